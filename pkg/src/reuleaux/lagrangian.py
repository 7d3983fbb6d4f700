"""Constrained formulations of the area problem.

Two parameterisations of a disk-polygon are used: by its vertices, with
diameter constraints ``|x_i - x_{i+k}| = 1``; and by its disk centres, with
``|c_i - c_{i+k}| = 1``. For Reuleaux polygons both vectors coincide. Hessians
are ``2n x 2n`` matrices ordered ``(x_0, y_0, x_1, y_1, ...)``.
"""

from __future__ import annotations

import csv
import io
import math
from dataclasses import dataclass

import numpy as np

from .area import area_from_centers, disk_polygon_area, segment_area_d1, segment_area_d2
from .errors import CoincidentPoints, InconsistentQ, InvalidN, RankDeficient
from .geometry import DiskPolygon, ReuleauxPolygon, as_points, build_regular_reuleaux, perp
from .sensitivity import arc_frames, area_gradient_disk_polygon, normal_integral

SKEW = np.array([[0.0, 1.0], [-1.0, 0.0]])


@dataclass(frozen=True)
class BlockMatrix:
    """Dense ``2n x 2n`` matrix viewed as an ``n x n`` grid of 2x2 blocks."""

    data: np.ndarray

    @property
    def n(self) -> int:
        return self.data.shape[0] // 2

    def block(self, i: int, j: int) -> np.ndarray:
        return self.data[2 * i : 2 * i + 2, 2 * j : 2 * j + 2]

    def is_symmetric(self, tol: float = 1e-12) -> bool:
        return bool(np.abs(self.data - self.data.T).max() <= tol)

    def quadratic_form(self, w) -> float:
        w = np.asarray(w, dtype=float).ravel()
        return float(w @ self.data @ w)

    def __add__(self, other: "BlockMatrix") -> "BlockMatrix":
        return BlockMatrix(self.data + other.data)

    def to_csv(self) -> str:
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        for row in self.data:
            writer.writerow([repr(float(v)) for v in row])
        return buf.getvalue()


@dataclass(frozen=True)
class Multipliers:
    values: np.ndarray
    residual: float

    def to_dict(self) -> dict:
        return {"lambda": [float(v) for v in self.values], "residual": self.residual}


@dataclass(frozen=True)
class CriticalConeVector:
    w: np.ndarray
    q: np.ndarray


def _vertices(x) -> np.ndarray:
    return as_points(x.vertices if hasattr(x, "vertices") else x)


def _k_of(n: int) -> int:
    if n < 3 or n % 2 == 0:
        raise InvalidN(f"need an odd number >= 3 of points, got {n}")
    return n // 2


def _diameter_vectors(x: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    k = _k_of(len(x))
    d = x - np.roll(x, -k, axis=0)  # x_i - x_{i+k}
    lengths = np.linalg.norm(d, axis=1)
    if np.any(lengths < 1e-14):
        raise CoincidentPoints("a diameter pair has coincident endpoints")
    return d, lengths


# --------------------------------------------------------------------------
# constraints


def constraint_values(x) -> np.ndarray:
    """``|x_i - x_{i+k}| - 1`` for every ``i``."""
    _, lengths = _diameter_vectors(_vertices(x))
    return lengths - 1.0


@dataclass(frozen=True)
class ConstraintGradient:
    """Nonzero blocks of the gradient of one diameter constraint."""

    i: int
    j: int
    d_i: np.ndarray
    d_j: np.ndarray


def constraint_gradients(x) -> list[ConstraintGradient]:
    x = _vertices(x)
    n = len(x)
    k = _k_of(n)
    d, lengths = _diameter_vectors(x)
    out = []
    for i in range(n):
        u = d[i] / lengths[i]
        out.append(ConstraintGradient(i, (i + k) % n, u, -u))
    return out


def constraint_jacobian(x) -> np.ndarray:
    """Dense ``n x 2n`` Jacobian of the diameter constraints."""
    x = _vertices(x)
    n = len(x)
    jac = np.zeros((n, 2 * n))
    for g in constraint_gradients(x):
        jac[g.i, 2 * g.i : 2 * g.i + 2] = g.d_i
        jac[g.i, 2 * g.j : 2 * g.j + 2] = g.d_j
    return jac


def _least_squares_multipliers(x: np.ndarray, grad: np.ndarray) -> Multipliers:
    jac = constraint_jacobian(x)
    n = len(x)
    if np.linalg.matrix_rank(jac) < n:
        raise RankDeficient("diameter constraint gradients are linearly dependent")
    g = grad.ravel()
    lam, *_ = np.linalg.lstsq(jac.T, -g, rcond=None)
    residual = float(np.linalg.norm(jac.T @ lam + g))
    return Multipliers(lam, residual)


# --------------------------------------------------------------------------
# vertices as variables


def lagrangian_vertices(x, lam) -> float:
    x = np.asarray(x, dtype=float).reshape(-1, 2)
    d, lengths = _diameter_vectors(x)
    return disk_polygon_area(x) + float(np.dot(lam, lengths - 1.0))


def solve_multipliers_vertices(r: ReuleauxPolygon) -> Multipliers:
    """Least-squares multipliers for stationarity of the vertex Lagrangian.

    ``residual`` is the norm of the Lagrangian gradient at the solution; it
    vanishes only at critical configurations.
    """
    x = _vertices(r)
    grad = area_gradient_disk_polygon(DiskPolygon.from_vertices(x))
    return _least_squares_multipliers(x, grad)


def distance_hessian_block(a, b, fp: float, fpp: float) -> np.ndarray:
    """``d^2/da^2`` of ``f(|a - b|)`` given ``f'`` and ``f''`` at ``|a - b|``."""
    d = np.asarray(a, float) - np.asarray(b, float)
    r = float(np.linalg.norm(d))
    if r < 1e-14:
        raise CoincidentPoints("distance Hessian undefined at coincident points")
    u = d / r
    uu = np.outer(u, u)
    return fpp * uu + (fp / r) * (np.eye(2) - uu)


def _add_pair(h: np.ndarray, i: int, j: int, block: np.ndarray) -> None:
    si, sj = slice(2 * i, 2 * i + 2), slice(2 * j, 2 * j + 2)
    h[si, si] += block
    h[sj, sj] += block
    h[si, sj] -= block
    h[sj, si] -= block


def polygon_area_hessian(n: int) -> BlockMatrix:
    """Constant Hessian of the shoelace area."""
    h = np.zeros((2 * n, 2 * n))
    half = 0.5 * SKEW
    for i in range(n):
        j = (i + 1) % n
        h[2 * i : 2 * i + 2, 2 * j : 2 * j + 2] += half
        h[2 * j : 2 * j + 2, 2 * i : 2 * i + 2] += half.T
    return BlockMatrix(h)


def segment_hessian(x) -> BlockMatrix:
    """Hessian of the sum of boundary segment areas ``sum f(|x_i - x_{i+1}|)``."""
    x = np.asarray(x, dtype=float)
    n = len(x)
    h = np.zeros((2 * n, 2 * n))
    for i in range(n):
        j = (i + 1) % n
        chord = float(np.linalg.norm(x[i] - x[j]))
        block = distance_hessian_block(x[i], x[j], segment_area_d1(chord), segment_area_d2(chord))
        _add_pair(h, i, j, block)
    return BlockMatrix(h)


def diameter_hessian(x, weights) -> BlockMatrix:
    """Hessian of ``sum_i weights[i] |x_i - x_{i+k}|``."""
    x = np.asarray(x, dtype=float)
    n = len(x)
    k = _k_of(n)
    h = np.zeros((2 * n, 2 * n))
    for i in range(n):
        j = (i + k) % n
        _add_pair(h, i, j, weights[i] * distance_hessian_block(x[i], x[j], 1.0, 0.0))
    return BlockMatrix(h)


def hessian_area_vertices(x) -> BlockMatrix:
    x = _vertices(x)
    return polygon_area_hessian(len(x)) + segment_hessian(x)


def hessian_lagrangian_vertices(r, m: Multipliers | None = None) -> BlockMatrix:
    """Hessian of area plus multiplier-weighted diameter constraints."""
    x = _vertices(r)
    if m is None:
        m = solve_multipliers_vertices(r)
    return hessian_area_vertices(x) + diameter_hessian(x, m.values)


# critical cone at a Reuleaux configuration


def diameter_directions(r) -> np.ndarray:
    """Unit vectors ``D_i = x_{i+k} - x_i``."""
    x = _vertices(r)
    d, lengths = _diameter_vectors(x)
    return -d / lengths[:, None]


def cone_closure_residual(r, q) -> np.ndarray:
    return (np.asarray(q, float)[:, None] * perp(diameter_directions(r))).sum(axis=0)


def project_q(r, q) -> np.ndarray:
    """Closest coefficient vector to ``q`` that closes around the index cycle."""
    q = np.asarray(q, dtype=float)
    a = perp(diameter_directions(r)).T  # 2 x n
    corr, *_ = np.linalg.lstsq(a, a @ q, rcond=None)
    return q - corr


def critical_cone_from_q(r, q, tol: float = 1e-10) -> CriticalConeVector:
    """Vertex field ``w`` with ``w_{i+k} - w_i = q_i D_i^perp`` and ``w_0 = 0``.

    Consecutive differences are ``w_{i+1} - w_i = -(W_{i+1} + W_{i-k})``; the
    field exists iff ``sum q_i D_i^perp = 0``.
    """
    x = _vertices(r)
    n = len(x)
    k = _k_of(n)
    q = np.asarray(q, dtype=float)
    if q.shape != (n,):
        raise ValueError(f"expected {n} coefficients, got shape {q.shape}")
    big_w = q[:, None] * perp(diameter_directions(x))
    gap = float(np.linalg.norm(big_w.sum(axis=0)))
    if gap > tol * max(1.0, float(np.abs(q).max())):
        raise InconsistentQ(f"coefficients do not close around the cycle (gap {gap:.3e})")
    w = np.zeros((n, 2))
    for i in range(n - 1):
        w[i + 1] = w[i] - big_w[(i + 1) % n] - big_w[(i - k) % n]
    return CriticalConeVector(w, q)


def blaschke_q(n: int) -> np.ndarray:
    """Cone coefficients of the two-vertex move of ``x_0`` and ``x_{-k}``."""
    k = _k_of(n)
    q = np.zeros(n)
    q[0] = q[1] = 1.0
    q[(-k) % n] = 2.0 * math.cos(math.pi / n)
    return q


def skew_term(w) -> float:
    """``sum_i w_i^T [[0, 1], [-1, 0]] w_{i+1}``: the shoelace part of ``w^T H w``."""
    w = np.asarray(w, dtype=float)
    nxt = np.roll(w, -1, axis=0)
    return float(np.sum(w[:, 0] * nxt[:, 1] - w[:, 1] * nxt[:, 0]))


def reduced_quadratic_form(n: int, q) -> float:
    """Non-shoelace part of ``w^T H w`` at the regular polygon, in cone coordinates."""
    k = _k_of(n)
    q = np.asarray(q, dtype=float)
    cross_sum = float(np.dot(q, np.roll(q, -k)))
    return math.tan(math.pi / (2 * n)) * (
        float(np.dot(q, q)) - (math.cos(math.pi / n) + 1.0) * cross_sum
    )


def quadratic_form_vertices(r, v: CriticalConeVector, m: Multipliers | None = None) -> float:
    return hessian_lagrangian_vertices(r, m).quadratic_form(v.w)


# --------------------------------------------------------------------------
# centres as variables


def _disk(c) -> DiskPolygon:
    return DiskPolygon.from_centers(_vertices(c))


def gradient_centers(c) -> np.ndarray:
    """Area gradient with respect to each centre: the integral of the normal."""
    return np.array([normal_integral(fr) for fr in arc_frames(_disk(c))])


def solve_multipliers_centers(r) -> Multipliers:
    c = _vertices(r)
    return _least_squares_multipliers(c, gradient_centers(c))


def lagrangian_centers(c, lam) -> float:
    c = np.asarray(c, dtype=float).reshape(-1, 2)
    _, lengths = _diameter_vectors(c)
    return area_from_centers(c) + float(np.dot(lam, lengths - 1.0))


def hessian_area_centers(c) -> BlockMatrix:
    """Hessian of the disk-intersection area with respect to the centres.

    Arc ``i`` (around ``c_i``) runs from vertex ``p_i`` to ``p_{i+1}``, and
    ``phi_j`` is the angle at ``p_j`` between the radii to ``c_{j-1}`` and
    ``c_j``. At a Reuleaux configuration ``p_i = c_{i+k}``,
    ``p_{i+1} = c_{i-k}`` and ``phi_{i+1} = theta_{i-k}``.
    """
    p = _disk(c)
    cs, verts = p.arc_centers, p.vertices
    n = p.n
    phi = np.empty(n)
    for j in range(n):
        a, b = cs[j - 1] - verts[j], cs[j] - verts[j]
        phi[j] = math.atan2(abs(a[0] * b[1] - a[1] * b[0]), float(a @ b))
    h = np.zeros((2 * n, 2 * n))
    for i, fr in enumerate(arc_frames(p)):
        nxt = (i + 1) % n
        b = fr.bisector
        t = perp(b)
        e_next = verts[nxt] - cs[i]
        e_this = verts[i] - cs[i]
        diag = (
            math.sin(fr.theta) * (np.outer(b, b) - np.outer(t, t))
            - np.outer(e_next, e_next) / math.tan(phi[nxt])
            - np.outer(e_this, e_this) / math.tan(phi[i])
        )
        h[2 * i : 2 * i + 2, 2 * i : 2 * i + 2] += diag
        h[2 * i : 2 * i + 2, 2 * nxt : 2 * nxt + 2] += (
            np.outer(e_next, verts[nxt] - cs[nxt]) / math.sin(phi[nxt])
        )
        prv = (i - 1) % n
        h[2 * i : 2 * i + 2, 2 * prv : 2 * prv + 2] += (
            np.outer(e_this, verts[i] - cs[prv]) / math.sin(phi[i])
        )
    return BlockMatrix(h)


def hessian_lagrangian_centers(r, m: Multipliers | None = None) -> BlockMatrix:
    c = _vertices(r)
    if m is None:
        m = solve_multipliers_centers(r)
    return hessian_area_centers(c) + diameter_hessian(c, m.values)


def blaschke_center_perturbation(r) -> np.ndarray:
    """Two-centre cone direction moving ``c_0`` and ``c_{-k}``; ``|w_0| = 1``."""
    c = _vertices(r)
    n = len(c)
    k = _k_of(n)
    if n < 5:
        raise InvalidN("the Reuleaux triangle admits no two-centre cone direction")
    m = (-k) % n
    w = np.zeros((n, 2))
    u0 = perp(c[0] - c[k])
    w[0] = u0 / np.linalg.norm(u0)
    um = perp(c[1] - c[m])
    d = c[0] - c[m]
    w[m] = (w[0] @ d) / (um @ d) * um
    return w


def quadratic_form_blaschke_centers(n: int) -> float:
    if not isinstance(n, (int, np.integer)) or n < 5 or n % 2 == 0:
        raise InvalidN(f"need odd n >= 5, got {n!r}")
    r = build_regular_reuleaux(n)
    w = blaschke_center_perturbation(r)
    return hessian_lagrangian_centers(r).quadratic_form(w)
