"""Planar primitives, disk-polygons and Reuleaux polygons.

Points and vectors are length-2 float arrays; polygons store their vertices
as read-only ``(n, 2)`` arrays in counter-clockwise order. Arc lengths are
angles in radians on unit circles.

Index conventions for a Reuleaux polygon with ``n = 2k + 1`` vertices:

* ``theta[i]`` is the length of the arc opposite vertex ``i``, which runs
  from ``x[i+k]`` to ``x[i+k+1]`` on the unit circle centred at ``x[i]``;
* the boundary arc from ``x[j]`` to ``x[j+1]`` is centred at ``x[j+k+1]``
  and has length ``theta[j+k+1]``.

All indices are taken modulo ``n``.
"""

from __future__ import annotations

import enum
import logging
import math
from dataclasses import dataclass, field

import numpy as np

from .errors import (
    DegenerateCircles,
    InvalidDiskPolygon,
    InvalidN,
    NotConstantWidth,
    RedundantCenter,
)

logger = logging.getLogger(__name__)

TAU_GEOM = 1e-9
TAU_CW = 1e-8
DELTA_MERGE = 1e-7
CIRCLE_EPS = 1e-12
MAX_CHORD = 2.0 - 1e-9


class Side(enum.Enum):
    """Which intersection of two circles to return, seen along ``c1 -> c2``."""

    LEFT = "left"
    RIGHT = "right"


def as_point(p) -> np.ndarray:
    arr = np.asarray(p, dtype=float)
    if arr.shape != (2,):
        raise ValueError(f"expected a planar point, got shape {arr.shape}")
    if not np.all(np.isfinite(arr)):
        raise ValueError("point coordinates must be finite")
    return arr


def as_points(pts) -> np.ndarray:
    arr = np.array(pts, dtype=float)
    if arr.ndim != 2 or arr.shape[1] != 2:
        raise ValueError(f"expected an (n, 2) array of points, got shape {arr.shape}")
    if not np.all(np.isfinite(arr)):
        raise ValueError("point coordinates must be finite")
    return arr


def _frozen(arr: np.ndarray) -> np.ndarray:
    arr = np.array(arr, dtype=float)
    arr.setflags(write=False)
    return arr


def perp(v: np.ndarray) -> np.ndarray:
    """Rotate a vector (or each row of an array) by +pi/2."""
    v = np.asarray(v, dtype=float)
    return np.stack([-v[..., 1], v[..., 0]], axis=-1)


def cross(a, b) -> float:
    return float(a[0] * b[1] - a[1] * b[0])


def signed_area(vertices: np.ndarray) -> float:
    x, y = vertices[:, 0], vertices[:, 1]
    return 0.5 * float(np.dot(x, np.roll(y, -1)) - np.dot(np.roll(x, -1), y))


def opposite_indices(i: int, n: int) -> tuple[int, int]:
    """Endpoints ``(i+k, i+k+1)`` of the arc opposite vertex ``i`` (mod ``n``)."""
    if n < 3 or n % 2 == 0:
        raise InvalidN(f"n must be odd and >= 3, got {n}")
    if not 0 <= i < n:
        raise IndexError(f"vertex index {i} out of range for n={n}")
    k = n // 2
    return (i + k) % n, (i + k + 1) % n


def _both_intersections(c1: np.ndarray, c2: np.ndarray, eps: float = CIRCLE_EPS):
    d = c2 - c1
    dist = math.hypot(d[0], d[1])
    if not eps < dist < 2.0 - eps:
        raise DegenerateCircles(
            f"unit circles with centre distance {dist!r} do not cross transversally"
        )
    mid = 0.5 * (c1 + c2)
    h = math.sqrt(max(0.0, 1.0 - 0.25 * dist * dist))
    offset = (h / dist) * np.array([-d[1], d[0]])
    return mid + offset, mid - offset


def circle_circle_intersection(c1, c2, pick: Side = Side.LEFT) -> np.ndarray:
    """Intersection of the unit circles centred at ``c1`` and ``c2``.

    ``pick`` selects the root to the left or right of the directed segment
    ``c1 -> c2``. Raises :class:`DegenerateCircles` for tangent, coincident
    or disjoint circles.
    """
    left, right = _both_intersections(as_point(c1), as_point(c2))
    return left if Side(pick) is Side.LEFT else right


def nearest_intersection(c1, c2, reference) -> tuple[np.ndarray, float]:
    """Root of two unit circles closest to ``reference``, and its distance to it.

    This is the continuity branch used when a configuration is deformed.
    """
    a, b = _both_intersections(np.asarray(c1, float), np.asarray(c2, float))
    ref = np.asarray(reference, float)
    da, db = np.linalg.norm(a - ref), np.linalg.norm(b - ref)
    return (a, float(da)) if da <= db else (b, float(db))


# --------------------------------------------------------------------------
# Disk-polygons


@dataclass(frozen=True, eq=False)
class DiskPolygon:
    """Intersection of unit disks, described by its boundary.

    ``arc_centers[i]`` is the centre of the boundary arc from ``vertices[i]``
    to ``vertices[i+1]`` and ``arc_lengths[i]`` its angular length.
    """

    vertices: np.ndarray
    arc_centers: np.ndarray
    arc_lengths: np.ndarray

    @property
    def n(self) -> int:
        return len(self.vertices)

    @classmethod
    def from_vertices(cls, vertices, tol: float = TAU_GEOM) -> "DiskPolygon":
        """Smallest intersection of unit disks containing the given corners.

        Clockwise input is reversed. Raises :class:`InvalidN` for fewer than
        three vertices and :class:`InvalidDiskPolygon` if the points are not
        the corners of such an intersection.
        """
        x = as_points(vertices)
        n = len(x)
        if n < 3:
            raise InvalidN(f"a disk-polygon needs at least 3 vertices, got {n}")
        if signed_area(x) < 0:
            x = x[::-1].copy()
        nxt = np.roll(x, -1, axis=0)
        chords = np.linalg.norm(nxt - x, axis=1)
        if np.any(chords <= CIRCLE_EPS):
            raise InvalidDiskPolygon("consecutive vertices coincide")
        if np.any(chords >= MAX_CHORD):
            raise InvalidDiskPolygon("an edge is too long for a unit-circle arc")
        centers = np.array(
            [circle_circle_intersection(x[i], nxt[i], Side.LEFT) for i in range(n)]
        )
        lengths = 2.0 * np.arcsin(0.5 * chords)
        poly = cls(_frozen(x), _frozen(centers), _frozen(lengths))
        poly._check_contains_vertices(tol)
        return poly

    @classmethod
    def from_centers(cls, centers, tol: float = TAU_GEOM) -> "DiskPolygon":
        """Intersection of the unit disks centred at ``centers``.

        The centres must be given in the order in which their arcs appear on
        the boundary (counter-clockwise) and none may be redundant. For a
        Reuleaux polygon the centres are the vertices themselves.
        """
        c = as_points(centers)
        n = len(c)
        if n < 3:
            raise InvalidN(f"a disk-polygon needs at least 3 disks, got {n}")
        try:
            # vertex i joins the arc of c[i-1] to the arc of c[i]
            p = np.array(
                [circle_circle_intersection(c[i - 1], c[i], Side.LEFT) for i in range(n)]
            )
        except DegenerateCircles as exc:
            raise RedundantCenter(str(exc)) from exc
        nxt = np.roll(p, -1, axis=0)
        lengths = np.empty(n)
        for i in range(n):
            a, b = p[i] - c[i], nxt[i] - c[i]
            lengths[i] = math.atan2(cross(a, b), float(np.dot(a, b)))
        if np.any(lengths <= 0.0):
            bad = [int(i) for i in np.flatnonzero(lengths <= 0.0)]
            raise RedundantCenter(f"disks {bad} contribute no boundary arc")
        poly = cls(_frozen(p), _frozen(c), _frozen(lengths))
        try:
            poly._check_contains_vertices(tol)
        except InvalidDiskPolygon as exc:
            raise RedundantCenter(str(exc)) from exc
        return poly

    def _check_contains_vertices(self, tol: float) -> None:
        d = np.linalg.norm(
            self.vertices[:, None, :] - self.arc_centers[None, :, :], axis=2
        )
        worst = float(d.max() - 1.0)
        if worst > tol:
            raise InvalidDiskPolygon(
                f"a vertex lies outside a bounding disk by {worst:.3e}"
            )


# --------------------------------------------------------------------------
# Reuleaux polygons


@dataclass(frozen=True)
class Violation:
    kind: str
    indices: tuple[int, ...]
    residual: float


@dataclass
class ValidationReport:
    n: int
    violations: list[Violation] = field(default_factory=list)
    max_residual: float = 0.0
    tol: float = TAU_CW

    @property
    def passed(self) -> bool:
        return not self.violations

    def __bool__(self) -> bool:
        return self.passed

    def kinds(self) -> set[str]:
        return {v.kind for v in self.violations}

    def to_dict(self) -> dict:
        return {
            "n": self.n,
            "passed": self.passed,
            "max_residual": self.max_residual,
            "tol": self.tol,
            "violations": [
                {"kind": v.kind, "indices": list(v.indices), "residual": v.residual}
                for v in self.violations
            ],
        }


def _vertices_of(p) -> np.ndarray:
    return as_points(p.vertices if hasattr(p, "vertices") else p)


def arc_lengths_opposite(x: np.ndarray) -> np.ndarray:
    """``theta[i]``: angular length of the arc opposite vertex ``i``."""
    n = len(x)
    k = n // 2
    a = np.roll(x, -k, axis=0)
    b = np.roll(x, -(k + 1), axis=0)
    chord = np.linalg.norm(a - b, axis=1)
    return 2.0 * np.arcsin(np.clip(0.5 * chord, 0.0, 1.0))


def validate_constant_width(p, tol: float = TAU_CW) -> ValidationReport:
    """Check the constant-width constraint set on a polygon's vertices.

    Parity, diameter equalities and the pairwise distance bound are checked
    first; the arc-length invariants are derived quantities and are only
    examined once those hold. Violations are reported, never raised.
    """
    x = _vertices_of(p)
    n = len(x)
    report = ValidationReport(n=n, tol=tol)
    if n < 3:
        report.violations.append(Violation("too_few_vertices", (), float(3 - n)))
        return report
    if n % 2 == 0:
        report.violations.append(Violation("parity", (), 1.0))
        return report
    area = signed_area(x)
    if area <= 0:
        report.violations.append(Violation("orientation", (), -area))
    k = n // 2
    dist = np.linalg.norm(x[:, None, :] - x[None, :, :], axis=2)
    worst = 0.0
    for i in range(n):
        j = (i + k) % n
        res = float(dist[i, j] - 1.0)
        worst = max(worst, abs(res))
        if abs(res) > tol:
            report.violations.append(Violation("diameter", (i, j), res))
    for i in range(n):
        for j in range(i + 1, n):
            if (j - i) % n in (k, k + 1):
                continue
            res = float(dist[i, j] - 1.0)
            worst = max(worst, max(res, 0.0))
            if res > tol:
                report.violations.append(Violation("distance", (i, j), res))
    if not report.violations:
        theta = arc_lengths_opposite(x)
        res = float(theta.sum() - math.pi)
        worst = max(worst, abs(res))
        if abs(res) > TAU_GEOM * n:
            report.violations.append(Violation("theta_sum", (), res))
        for i, t in enumerate(theta):
            over = max(-t, t - math.pi / 3)
            if over > TAU_GEOM:
                report.violations.append(Violation("theta_range", (i,), float(over)))
    report.max_residual = worst
    return report


def drop_merged_vertices(x: np.ndarray, merge_tol: float = DELTA_MERGE) -> np.ndarray:
    """Remove collapsed arcs from an odd vertex cycle.

    When consecutive vertices ``j, j+1`` are closer than ``merge_tol`` the arc
    between them has vanished, so the disk centred at the opposite vertex
    ``j - k`` is redundant. Both that vertex and the duplicate are removed,
    keeping ``n`` odd.
    """
    x = np.array(x, dtype=float)
    while len(x) >= 5 and len(x) % 2 == 1:
        n = len(x)
        k = n // 2
        gaps = np.linalg.norm(np.roll(x, -1, axis=0) - x, axis=1)
        j = int(np.argmin(gaps))
        if gaps[j] >= merge_tol:
            break
        drop = {(j + 1) % n, (j - k) % n}
        logger.info("merging vertices %d,%d and dropping vertex %d", j, (j + 1) % n, (j - k) % n)
        x = np.array([x[m] for m in range(n) if m not in drop])
    return x


@dataclass(frozen=True, eq=False)
class ReuleauxPolygon:
    """A unit-width Reuleaux polygon with an odd number of vertices.

    Build instances with :meth:`from_vertices` or
    :func:`build_regular_reuleaux`; both validate the constraint set.
    """

    vertices: np.ndarray
    theta: np.ndarray

    @property
    def n(self) -> int:
        return len(self.vertices)

    @property
    def k(self) -> int:
        return self.n // 2

    @classmethod
    def from_vertices(
        cls, vertices, tol: float = TAU_CW, merge_tol: float = DELTA_MERGE
    ) -> "ReuleauxPolygon":
        x = as_points(vertices)
        if len(x) >= 3 and signed_area(x) < 0:
            x = x[::-1].copy()
        if len(x) % 2 == 1:
            x = drop_merged_vertices(x, merge_tol)
        report = validate_constant_width(x, tol)
        if not report.passed:
            kinds = ", ".join(sorted(report.kinds()))
            if "parity" in report.kinds() or "too_few_vertices" in report.kinds():
                raise InvalidN(f"Reuleaux polygons have an odd number >= 3 of vertices ({kinds})")
            raise NotConstantWidth(f"not a Reuleaux polygon: {kinds}", report)
        return cls._trusted(x)

    @classmethod
    def _trusted(cls, x: np.ndarray) -> "ReuleauxPolygon":
        return cls(_frozen(x), _frozen(arc_lengths_opposite(x)))

    def diameter_partners(self, i: int) -> tuple[int, int]:
        return opposite_indices(i, self.n)

    def to_disk_polygon(self) -> DiskPolygon:
        """The same body as a disk-polygon; arc centres are opposite vertices."""
        n, k = self.n, self.k
        x = self.vertices
        centers = np.roll(x, -(k + 1), axis=0)
        lengths = np.roll(self.theta, -(k + 1))
        return DiskPolygon(x, _frozen(centers), _frozen(lengths))

    def rotated_labels(self, shift: int) -> "ReuleauxPolygon":
        """Same polygon with vertex ``i`` relabelled as ``i - shift``."""
        return ReuleauxPolygon._trusted(np.roll(self.vertices, -shift, axis=0))


def build_regular_reuleaux(n: int) -> ReuleauxPolygon:
    """Regular Reuleaux ``n``-gon of unit width, first vertex on the +y axis."""
    if not isinstance(n, (int, np.integer)) or n < 3 or n % 2 == 0:
        raise InvalidN(f"n must be an odd integer >= 3, got {n!r}")
    radius = 1.0 / (2.0 * math.cos(math.pi / (2 * n)))
    ang = math.pi / 2 + 2.0 * math.pi * np.arange(n) / n
    x = radius * np.column_stack([np.cos(ang), np.sin(ang)])
    return ReuleauxPolygon._trusted(x)
