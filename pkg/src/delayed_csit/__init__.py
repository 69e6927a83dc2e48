"""DoF regions and retrospective interference-alignment schemes for the
two-user MIMO interference channel with delayed local CSIT."""

from .config import AntennaConfig, ConfigClass, ConfigError, MisoConfig, classify, derived, normalize
from .geometry import DofPoint, GeometryError, HalfPlane, Polytope2D
from .regions import ConsistencyError, RegionBundle, miso_bounds, region_bundle
from .schemes import SchemeError, SchemeSpec, Variant, corner_scheme, rank_condition, rank_terms

__all__ = [
    "AntennaConfig",
    "ConfigClass",
    "ConfigError",
    "ConsistencyError",
    "DofPoint",
    "GeometryError",
    "HalfPlane",
    "MisoConfig",
    "Polytope2D",
    "RegionBundle",
    "SchemeError",
    "SchemeSpec",
    "Variant",
    "classify",
    "corner_scheme",
    "derived",
    "miso_bounds",
    "normalize",
    "rank_condition",
    "rank_terms",
    "region_bundle",
]

__version__ = "0.1.0"
