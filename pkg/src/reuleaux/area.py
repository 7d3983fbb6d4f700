"""Areas of disk-polygons and Reuleaux polygons.

The area of a disk-polygon is the area of its vertex polygon plus one
circular segment per boundary arc; the segment cut from a unit disk by a
chord of length ``x`` has area ``f(x) = asin(x/2) - (x/2) sqrt(1 - x^2/4)``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import InvalidN, OutOfRange
from .geometry import MAX_CHORD, DiskPolygon, ReuleauxPolygon, signed_area


@dataclass(frozen=True)
class AreaBreakdown:
    polygon_part: float
    segment_parts: np.ndarray
    total: float


def _check_chord(chord: float) -> float:
    chord = float(chord)
    if not 0.0 <= chord <= MAX_CHORD:
        raise OutOfRange(f"chord length must lie in [0, 2), got {chord!r}")
    return chord


def segment_area(chord: float) -> float:
    x = _check_chord(chord)
    h = 0.5 * x
    return math.asin(h) - h * math.sqrt(1.0 - h * h)


def segment_area_d1(chord: float) -> float:
    x = _check_chord(chord)
    return x * x / (2.0 * math.sqrt(4.0 - x * x))


def segment_area_d2(chord: float) -> float:
    x = _check_chord(chord)
    return x * (8.0 - x * x) / (2.0 * (4.0 - x * x) ** 1.5)


def _segments(chords: np.ndarray) -> np.ndarray:
    h = 0.5 * chords
    return np.arcsin(h) - h * np.sqrt(1.0 - h * h)


def disk_polygon_area(vertices) -> float:
    """Area of the disk-polygon with the given counter-clockwise corners.

    No validation: this is the smooth closed form used by finite-difference
    oracles, where perturbed points need not form a valid configuration.
    """
    x = np.asarray(vertices, dtype=float)
    chords = np.linalg.norm(np.roll(x, -1, axis=0) - x, axis=1)
    return signed_area(x) + float(_segments(chords).sum())


def area_disk_polygon(p: DiskPolygon | ReuleauxPolygon) -> AreaBreakdown:
    if isinstance(p, ReuleauxPolygon):
        p = p.to_disk_polygon()
    x = p.vertices
    chords = np.linalg.norm(np.roll(x, -1, axis=0) - x, axis=1)
    segments = _segments(chords)
    poly = signed_area(x)
    return AreaBreakdown(poly, segments, poly + float(segments.sum()))


def area(p) -> float:
    return area_disk_polygon(p).total


def area_from_centers(centers) -> float:
    """Area of the intersection of unit disks centred at ``centers``."""
    return area_disk_polygon(DiskPolygon.from_centers(centers)).total


def _check_odd(n) -> int:
    if not isinstance(n, (int, np.integer)) or n < 3 or n % 2 == 0:
        raise InvalidN(f"n must be an odd integer >= 3, got {n!r}")
    return int(n)


def area_regular_reuleaux(n: int) -> float:
    """Closed-form area of the regular Reuleaux ``n``-gon of unit width."""
    n = _check_odd(n)
    a = math.pi / n
    return math.pi / 2 - n * math.sin(a) / (2.0 * (math.cos(a) + 1.0))


def area_regular_reuleaux_sectors(n: int) -> float:
    """Same area assembled as inner regular polygon plus ``n`` disk segments."""
    n = _check_odd(n)
    a = math.pi / n
    polygon = n * math.sin(2 * a) / (8.0 * math.cos(a / 2) ** 2)
    return polygon + 0.5 * (math.pi - n * math.sin(a))


def regular_area_profile(x):
    """``g(x) = sin x / (2x (cos x + 1)) = tan(x/2) / (2x)``.

    Regular areas are ``pi/2 - pi * g(pi/n)``. ``g`` increases with ``x``, so
    ``g(pi/n)`` decreases with ``n`` and the areas increase.
    """
    x = np.asarray(x, dtype=float)
    return np.sin(x) / (2.0 * x * (np.cos(x) + 1.0))


def area_oracle_discretized(p: DiskPolygon | ReuleauxPolygon, m: int = 1024) -> float:
    """Shoelace area of the boundary sampled at ``m`` points per arc.

    An inscribed-polygon approximation with O(m^-2) error, independent of
    the segment formula; meant only for cross-checks.
    """
    if m < 16:
        raise ValueError("need at least 16 samples per arc")
    if isinstance(p, ReuleauxPolygon):
        p = p.to_disk_polygon()
    pts = []
    s = np.arange(m) / m
    for v, c, t in zip(p.vertices, p.arc_centers, p.arc_lengths):
        start = math.atan2(v[1] - c[1], v[0] - c[0])
        phi = start + t * s
        pts.append(c + np.column_stack([np.cos(phi), np.sin(phi)]))
    return signed_area(np.concatenate(pts))


def sweep_regular_areas(n_max: int) -> list[tuple[int, float]]:
    n_max = _check_odd(n_max)
    return [(n, area_regular_reuleaux(n)) for n in range(3, n_max + 1, 2)]
