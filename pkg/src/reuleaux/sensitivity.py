"""First- and second-order sensitivity of area under vertex perturbations.

Two settings are covered. For a general disk-polygon every vertex may move
freely and each boundary arc contributes independently. For a Reuleaux
polygon a move of vertex ``i`` drags the endpoints ``i+k`` and ``i+k+1`` of
its opposite arc along so that the width stays one; formulas below are
written for vertex ``i`` with that labelling.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import (
    DegenerateCircles,
    OutOfRange,
    SingularArc,
    StepTooLarge,
    TriangleImmovable,
)
from .geometry import (
    TAU_CW,
    DiskPolygon,
    ReuleauxPolygon,
    as_point,
    nearest_intersection,
    perp,
    signed_area,
    validate_constant_width,
)

SINGULAR_THETA = 1e-9
BRANCH_JUMP = 0.5


@dataclass(frozen=True)
class ArcFrame:
    """Local data of one boundary arc from ``x_i`` to ``x_{i+1}``.

    ``w_i`` and ``w_ip1`` are the unit radii from the centre to the two
    endpoints and ``bisector`` points from the centre to the arc midpoint.
    """

    center: np.ndarray
    w_i: np.ndarray
    w_ip1: np.ndarray
    bisector: np.ndarray
    theta: float

    @classmethod
    def from_arc(cls, x_i, x_ip1, center) -> "ArcFrame":
        c = as_point(center)
        wi, wj = as_point(x_i) - c, as_point(x_ip1) - c
        s = wi + wj
        ns = np.linalg.norm(s)
        if ns == 0.0:
            raise SingularArc("arc is a half circle; bisector undefined")
        theta = math.atan2(wi[0] * wj[1] - wi[1] * wj[0], float(wi @ wj))
        return cls(c, wi, wj, s / ns, abs(theta))


def arc_frames(p: DiskPolygon) -> list[ArcFrame]:
    nxt = np.roll(p.vertices, -1, axis=0)
    return [ArcFrame.from_arc(a, b, c) for a, b, c in zip(p.vertices, nxt, p.arc_centers)]


def _check_arc(theta: float) -> None:
    if abs(math.sin(theta)) < 1e-12 or theta < SINGULAR_THETA:
        raise SingularArc(f"degenerate arc of length {theta!r}")


def avg_normal_on_arc(theta: float, v, bisector) -> float:
    """Integral of ``v . n`` over a unit-circle arc of length ``theta``."""
    if not 0.0 < theta < math.pi:
        raise OutOfRange(f"arc length must lie in (0, pi), got {theta!r}")
    return 2.0 * math.sin(theta / 2) * float(np.dot(v, bisector))


def normal_integral(frame: ArcFrame) -> np.ndarray:
    """Vector integral of the outer normal over the arc."""
    return 2.0 * math.sin(frame.theta / 2) * frame.bisector


def center_velocity(frame: ArcFrame, v_i, v_ip1) -> np.ndarray:
    """Velocity of the arc centre when its endpoints move with ``v_i, v_ip1``.

    Solves the 2x2 Gram system in the basis of the two radii.
    """
    _check_arc(frame.theta)
    c = math.cos(frame.theta)
    gram = np.array([[1.0, c], [c, 1.0]])
    rhs = np.array([np.dot(v_i, frame.w_i), np.dot(v_ip1, frame.w_ip1)])
    alpha = np.linalg.solve(gram, rhs)
    return alpha[0] * frame.w_i + alpha[1] * frame.w_ip1


def arc_area_contribution(frame: ArcFrame, v_i, v_ip1) -> float:
    _check_arc(frame.theta)
    return math.tan(frame.theta / 2) * float(
        np.dot(frame.w_i, v_i) + np.dot(frame.w_ip1, v_ip1)
    )


def area_gradient_disk_polygon(p: DiskPolygon | ReuleauxPolygon) -> np.ndarray:
    """Gradient of the area with respect to each vertex, shape ``(n, 2)``."""
    if isinstance(p, ReuleauxPolygon):
        p = p.to_disk_polygon()
    grad = np.zeros_like(p.vertices)
    n = p.n
    for j, fr in enumerate(arc_frames(p)):
        _check_arc(fr.theta)
        t = math.tan(fr.theta / 2)
        grad[j] += t * fr.w_i
        grad[(j + 1) % n] += t * fr.w_ip1
    return grad


def area_rate_disk_polygon(p: DiskPolygon, velocities) -> float:
    """Shape derivative of the area for one velocity per vertex."""
    v = np.asarray(velocities, dtype=float)
    n = p.n
    return sum(
        arc_area_contribution(fr, v[j], v[(j + 1) % n]) for j, fr in enumerate(arc_frames(p))
    )


# --------------------------------------------------------------------------
# Reuleaux polygons


def _require_movable(r: ReuleauxPolygon) -> None:
    if r.n == 3:
        raise TriangleImmovable("the Reuleaux triangle admits no single-vertex perturbation")


def _labels(r: ReuleauxPolygon, i: int):
    n, k = r.n, r.k
    i %= n
    return i, (i + k) % n, (i + k + 1) % n


def propagate_vertex_perturbation(r: ReuleauxPolygon, i: int, v, t: float) -> ReuleauxPolygon:
    """Move vertex ``i`` to ``x_i + t v`` and re-seat its opposite arc.

    The endpoints of the opposite arc are re-intersected with the circles
    through their fixed neighbours, choosing the root closest to the old
    position. Raises :class:`StepTooLarge` when the result leaves the
    admissible range of arc lengths, flips branch, or breaks the width.
    """
    _require_movable(r)
    n = r.n
    i, ik, ik1 = _labels(r, i)
    if t == 0.0:
        return r
    x = np.array(r.vertices)
    x[i] = x[i] + t * as_point(v)
    try:
        x[ik], jump_a = nearest_intersection(x[i], r.vertices[(i - 1) % n], r.vertices[ik])
        x[ik1], jump_b = nearest_intersection(x[i], r.vertices[(i + 1) % n], r.vertices[ik1])
    except DegenerateCircles as exc:
        raise StepTooLarge(f"step {t!r} tears the opposite arc apart") from exc
    if max(jump_a, jump_b) > BRANCH_JUMP:
        raise StepTooLarge("opposite vertex switched intersection branch")
    return _checked_reuleaux(x, f"step {t!r} at vertex {i}")


def _checked_reuleaux(x: np.ndarray, what: str) -> ReuleauxPolygon:
    if signed_area(x) <= 0:
        raise StepTooLarge(f"{what} reverses the orientation")
    report = validate_constant_width(x, TAU_CW)
    if not report.passed:
        raise StepTooLarge(f"{what} leaves the constant-width set: {sorted(report.kinds())}")
    out = ReuleauxPolygon._trusted(x)
    th = out.theta
    if th.min() <= 0.0 or th.max() >= math.pi / 3:
        raise StepTooLarge(f"{what} pushes an arc length out of (0, pi/3)")
    return out


def bisector(r: ReuleauxPolygon, i: int) -> np.ndarray:
    """Unit bisector of the angle ``x_{i+k} x_i x_{i+k+1}``, pointing inward."""
    i, ik, ik1 = _labels(r, i)
    x = r.vertices
    s = (x[ik] - x[i]) + (x[ik1] - x[i])
    return s / np.linalg.norm(s)


def _check_thetas(r: ReuleauxPolygon, *idx: int) -> None:
    for j in idx:
        if r.theta[j] < SINGULAR_THETA:
            raise SingularArc(f"arc opposite vertex {j} has collapsed")


def directional_derivative_reuleaux(r: ReuleauxPolygon, i: int, v) -> float:
    """Rate of change of area when vertex ``i`` moves with velocity ``v``."""
    _require_movable(r)
    i, ik, ik1 = _labels(r, i)
    _check_thetas(r, i, ik, ik1)
    x, th = r.vertices, r.theta
    v = as_point(v)
    return (
        2.0 * math.sin(th[i] / 2) * float(v @ bisector(r, i))
        + math.tan(th[ik] / 2) * float(v @ (x[i] - x[ik]))
        + math.tan(th[ik1] / 2) * float(v @ (x[i] - x[ik1]))
    )


def gradient_reuleaux(r: ReuleauxPolygon, i: int) -> np.ndarray:
    """Gradient of the area with respect to vertex ``i`` along admissible moves."""
    _require_movable(r)
    i, ik, ik1 = _labels(r, i)
    _check_thetas(r, i, ik, ik1)
    x, th = r.vertices, r.theta
    t0 = math.tan(th[i] / 2)
    return (math.tan(th[ik] / 2) - t0) * (x[i] - x[ik]) + (
        math.tan(th[ik1] / 2) - t0
    ) * (x[i] - x[ik1])


def gradient_field_reuleaux(r: ReuleauxPolygon) -> np.ndarray:
    return np.array([gradient_reuleaux(r, i) for i in range(r.n)])


def blaschke_direction(r: ReuleauxPolygon, i: int) -> np.ndarray:
    """Unit tangent moving ``x_i`` along the circle about ``x_{i+k}``.

    The direction is the one that lengthens the arc ``x_{i-1} x_i`` and
    leaves ``x_{i+k}`` in place.
    """
    i, ik, ik1 = _labels(r, i)
    x = r.vertices
    u = x[ik] - x[i]
    t = perp(u) / np.linalg.norm(u)
    return -t if t @ (x[ik1] - x[i]) > 0 else t


def blaschke_derivative(r: ReuleauxPolygon, i: int) -> float:
    _require_movable(r)
    i, _, ik1 = _labels(r, i)
    th = r.theta
    return math.sin(th[i]) * (math.tan(th[ik1] / 2) - math.tan(th[i] / 2))


def opposite_vertex_velocities(r: ReuleauxPolygon, i: int, w) -> tuple[np.ndarray, np.ndarray]:
    """Velocities of ``x_{i+k}`` and ``x_{i+k+1}`` induced by ``x_i' = w``."""
    _require_movable(r)
    n = r.n
    i, ik, ik1 = _labels(r, i)
    x = r.vertices
    w = as_point(w)

    def solve(p, fixed):
        m = np.array([p - x[i], p - fixed])
        return np.linalg.solve(m, np.array([(p - x[i]) @ w, 0.0]))

    return solve(x[ik], x[(i - 1) % n]), solve(x[ik1], x[(i + 1) % n])


def vertex_velocity_field(r: ReuleauxPolygon, i: int, w) -> np.ndarray:
    """Full first-order velocity field of the constrained move of vertex ``i``."""
    i, ik, ik1 = _labels(r, i)
    field = np.zeros_like(r.vertices)
    field[i] = as_point(w)
    field[ik], field[ik1] = opposite_vertex_velocities(r, i, w)
    return field


def theta_rates(r: ReuleauxPolygon, i: int, w) -> tuple[float, float, float]:
    """Rates ``(theta_i', theta_{i+k}', theta_{i+k+1}')`` when ``x_i' = w``.

    The two arcs adjacent to ``x_i`` follow from the chords to the fixed
    neighbours; the opposite arc uses the induced velocities of its endpoints.
    """
    n = r.n
    i, ik, ik1 = _labels(r, i)
    x, th = r.vertices, r.theta
    w = as_point(w)

    def chord_rate(a, b, da, db):
        d = a - b
        return float(d @ (da - db)) / float(np.linalg.norm(d))

    zero = np.zeros(2)
    d_next = chord_rate(x[i], x[(i + 1) % n], w, zero) / math.cos(th[ik1] / 2)
    d_prev = chord_rate(x[i], x[(i - 1) % n], w, zero) / math.cos(th[ik] / 2)
    va, vb = opposite_vertex_velocities(r, i, w)
    d_opp = chord_rate(x[ik1], x[ik], vb, va) / math.cos(th[i] / 2)
    return d_opp, d_prev, d_next


def bisector_second_derivative(theta: float) -> float:
    """Second derivative of area along the bisector move at a critical vertex.

    Valid where the three arcs meeting the moved vertex share the length
    ``theta``. Negative exactly when ``tan(theta/2) tan(theta) < 1/2``.
    """
    if not 0.0 < theta <= math.pi / 3 + 1e-15:
        raise OutOfRange(f"theta must lie in (0, pi/3], got {theta!r}")
    return (
        2.0
        * (math.sin(theta / 2) * math.sin(theta) - math.cos(1.5 * theta))
        / (math.cos(theta / 2) * math.sin(theta))
    )


def critical_angle_bound_check(theta: float) -> float:
    """Length of the chord ``x_{1} x_{n-1}`` when three adjacent arcs equal ``theta``.

    The diameter bound (value <= 1) holds only on ``[0, pi/5]`` and at ``pi/3``.
    """
    s = math.sin(theta / 2)
    return -8.0 * s**3 + 4.0 * s
