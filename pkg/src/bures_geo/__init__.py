"""Geodesics of the Bures metric, their unitary and circuit realizations, and
single-parameter estimation along them."""

__version__ = "0.1.0"

from .errors import BuresGeoError, InputError, NumericalError, PreconditionError
from .geodesics import (
    GeodesicSpec,
    boundary_intersections,
    build_geodesic,
    enumerate_geodesics,
    geodesic_to_pure,
)
from .states import (
    DensityMatrix,
    Purification,
    bures_angle,
    bures_distance,
    bures_metric,
    fidelity,
    purify,
    root_fidelity,
    sld,
)

__all__ = [
    "__version__",
    "BuresGeoError",
    "InputError",
    "NumericalError",
    "PreconditionError",
    "GeodesicSpec",
    "boundary_intersections",
    "build_geodesic",
    "enumerate_geodesics",
    "geodesic_to_pure",
    "DensityMatrix",
    "Purification",
    "bures_angle",
    "bures_distance",
    "bures_metric",
    "fidelity",
    "purify",
    "root_fidelity",
    "sld",
]
