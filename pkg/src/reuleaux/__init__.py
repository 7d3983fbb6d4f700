"""Area sensitivities and optimality conditions for Reuleaux polygons."""

from .errors import ReuleauxError
from .geometry import (
    DiskPolygon,
    ReuleauxPolygon,
    Side,
    build_regular_reuleaux,
    circle_circle_intersection,
    opposite_indices,
    validate_constant_width,
)
from .area import area, area_disk_polygon, area_regular_reuleaux

__all__ = [
    "DiskPolygon",
    "ReuleauxError",
    "ReuleauxPolygon",
    "Side",
    "area",
    "area_disk_polygon",
    "area_regular_reuleaux",
    "build_regular_reuleaux",
    "circle_circle_intersection",
    "opposite_indices",
    "validate_constant_width",
]

__version__ = "0.1.0"
