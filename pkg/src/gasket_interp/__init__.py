"""Exact geodesics, interpolants and interpolating measures on Sierpinski n-gaskets."""

from .core import (
    BaryCoord,
    Cell,
    PointAddress,
    address_to_bary,
    apply_map,
    bary_to_address,
    canonicalize,
    common_cell,
    dual_address,
    inverse_map,
    phi_projection,
)
from .errors import (
    BudgetExceeded,
    DimensionMismatch,
    DomainError,
    GasketError,
    InvalidWeights,
    NoCommonPath,
    NotConnected,
    NotInCell,
    NotOnGasket,
    OutsideWindow,
    SamePoint,
)
from .metric import (
    Geodesic,
    boundary_distance,
    boundary_multiplicity,
    count_geodesics,
    distance,
    enumerate_geodesics,
    point_along,
)

__version__ = "0.1.0"
