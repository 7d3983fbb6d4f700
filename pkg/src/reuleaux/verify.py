"""Independent numerical oracles and the pairing registry behind ``certify``.

Every closed-form derivative in :mod:`reuleaux.sensitivity` and
:mod:`reuleaux.lagrangian` is paired here with an oracle that does not share
its code path (finite differences, quadrature, the discretised boundary).
Thresholds live with each pairing.
"""

from __future__ import annotations

import importlib
import math
from dataclasses import asdict, dataclass
from typing import Callable

import numpy as np
from scipy.integrate import simpson

from . import lagrangian as lag
from . import sensitivity as sens
from .geometry import DELTA_MERGE, DiskPolygon, Side, build_regular_reuleaux, circle_circle_intersection, perp

# the package re-exports a function named ``area``, which shadows the module
area_mod = importlib.import_module(".area", __package__)


@dataclass
class OracleReport:
    name: str
    max_abs_err: float
    max_rel_err: float
    samples: int
    passed: bool
    notes: str = ""

    def to_dict(self) -> dict:
        d = asdict(self)
        d["pass"] = d.pop("passed")
        return d


# --------------------------------------------------------------------------
# oracles


def fd_directional(fn: Callable, r, i: int, v, h: float = 1e-6) -> float:
    """Central difference of ``fn`` along the constrained move of vertex ``i``."""
    plus = sens.propagate_vertex_perturbation(r, i, v, h)
    minus = sens.propagate_vertex_perturbation(r, i, v, -h)
    return (fn(plus) - fn(minus)) / (2.0 * h)


def fd_second_directional(fn: Callable, r, i: int, v, h: float = 1e-4) -> float:
    plus = sens.propagate_vertex_perturbation(r, i, v, h)
    minus = sens.propagate_vertex_perturbation(r, i, v, -h)
    return (fn(plus) - 2.0 * fn(r) + fn(minus)) / (h * h)


def fd_gradient(fn: Callable, x, h: float = 1e-6) -> np.ndarray:
    x0 = np.asarray(x, dtype=float)
    flat = x0.ravel()
    out = np.empty_like(flat)
    for j in range(flat.size):
        e = np.zeros_like(flat)
        e[j] = h
        out[j] = (fn((flat + e).reshape(x0.shape)) - fn((flat - e).reshape(x0.shape))) / (2 * h)
    return out.reshape(x0.shape)


def fd_hessian(fn: Callable, x, h: float = 1e-4) -> lag.BlockMatrix:
    """Symmetric central second differences of ``fn`` over the flattened ``x``."""
    x0 = np.asarray(x, dtype=float)
    flat = x0.ravel()
    m = flat.size

    def ev(d):
        return fn((flat + d).reshape(x0.shape))

    f0 = ev(np.zeros(m))
    hess = np.empty((m, m))
    for a in range(m):
        ea = np.zeros(m)
        ea[a] = h
        hess[a, a] = (ev(ea) - 2.0 * f0 + ev(-ea)) / (h * h)
        for b in range(a + 1, m):
            eb = np.zeros(m)
            eb[b] = h
            val = (ev(ea + eb) - ev(ea - eb) - ev(eb - ea) + ev(-ea - eb)) / (4.0 * h * h)
            hess[a, b] = hess[b, a] = val
    return lag.BlockMatrix(hess)


def arc_quadrature(theta: float, integrand: Callable, m: int = 64, bisector=(1.0, 0.0)):
    """Composite Simpson rule with ``m`` panels over a unit-circle arc of length ``theta``.

    Each panel is one three-point Simpson application, so ``2m + 1`` nodes are
    used. The arc is centred on ``bisector``; ``integrand(normal, tangent)``
    receives ``(2m+1, 2)`` arrays of outer normals and counter-clockwise
    tangents and returns one value (or vector) per node.
    """
    if m < 8:
        raise ValueError("need at least 8 panels")
    b = np.asarray(bisector, dtype=float)
    mid = math.atan2(b[1], b[0])
    phi = np.linspace(mid - theta / 2, mid + theta / 2, 2 * m + 1)
    normal = np.column_stack([np.cos(phi), np.sin(phi)])
    tangent = perp(normal)
    values = np.asarray(integrand(normal, tangent), dtype=float)
    if values.ndim == 0:
        values = np.full(phi.shape, float(values))
    return simpson(values, x=phi, axis=0)


def numerical_rank(a, tol: float = 1e-10) -> int:
    """Rank by Gaussian elimination with partial pivoting (no SVD)."""
    a = np.array(a, dtype=float)
    rows, cols = a.shape
    scale = max(1.0, float(np.abs(a).max()))
    rank = 0
    for col in range(cols):
        if rank == rows:
            break
        piv = rank + int(np.argmax(np.abs(a[rank:, col])))
        if abs(a[piv, col]) <= tol * scale:
            continue
        a[[rank, piv]] = a[[piv, rank]]
        a[rank + 1 :] -= np.outer(a[rank + 1 :, col] / a[rank, col], a[rank])
        rank += 1
    return rank


def rel_err(approx: float, exact: float, floor: float = 1e-12) -> float:
    return abs(approx - exact) / max(abs(exact), floor)


# --------------------------------------------------------------------------
# pairing registry


@dataclass(frozen=True)
class Pairing:
    name: str
    threshold: float
    metric: str
    run: Callable[[], tuple[float, float, int]]


PAIRINGS: dict[str, Pairing] = {}


def pairing(name: str, threshold: float, metric: str = "abs"):
    """Register ``fn() -> (max_abs_err, max_rel_err, samples)`` under ``name``."""

    def deco(fn):
        PAIRINGS[name] = Pairing(name, threshold, metric, fn)
        return fn

    return deco


def run_pairing(p: Pairing) -> OracleReport:
    try:
        abs_err, rel, samples = p.run()
    except Exception as exc:  # a crashing pairing is a failed pairing
        return OracleReport(p.name, math.inf, math.inf, 0, False, f"error: {exc!r}")
    err = abs_err if p.metric == "abs" else rel
    ok = bool(np.isfinite(err) and err < p.threshold)
    return OracleReport(p.name, abs_err, rel, samples, ok, f"{p.metric} threshold {p.threshold:g}")


def certify(names=None) -> list[OracleReport]:
    selected = PAIRINGS.values() if names is None else [PAIRINGS[n] for n in names]
    return [run_pairing(p) for p in sorted(selected, key=lambda p: p.name)]


def _instances(ns=(7, 9), count=6, seed=2024):
    from .optimize import random_reuleaux

    rng = np.random.default_rng(seed)
    return [random_reuleaux(n, rng) for n in ns for _ in range(count)]


def _unit(rng):
    a = rng.uniform(0, 2 * math.pi)
    return np.array([math.cos(a), math.sin(a)])


def _collect(pairs):
    pairs = list(pairs)
    abs_errs = [abs(a - b) for a, b in pairs]
    rels = [rel_err(a, b) for a, b in pairs]
    return max(abs_errs), max(rels), len(pairs)


@pairing("segment_area_d1~fd", 1e-9)
def _p_segment_d1():
    xs = np.linspace(0.05, 1.5, 30)
    h = 1e-6
    return _collect(
        (area_mod.segment_area_d1(x), (area_mod.segment_area(x + h) - area_mod.segment_area(x - h)) / (2 * h))
        for x in xs
    )


@pairing("segment_area_d2~fd", 1e-8)
def _p_segment_d2():
    xs = np.linspace(0.05, 1.5, 30)
    h = 1e-6
    return _collect(
        (area_mod.segment_area_d2(x), (area_mod.segment_area_d1(x + h) - area_mod.segment_area_d1(x - h)) / (2 * h))
        for x in xs
    )


@pairing("avg_normal_on_arc~quadrature", 1e-10)
def _p_avg_normal():
    rng = np.random.default_rng(1)
    out = []
    for _ in range(20):
        theta = rng.uniform(0.05, 3.0)
        b = _unit(rng)
        v = rng.normal(size=2)
        quad = arc_quadrature(theta, lambda nrm, tan: nrm @ v, m=512, bisector=b)
        out.append((sens.avg_normal_on_arc(theta, v, b), quad))
    return _collect(out)


@pairing("normal_tensor_integral~quadrature", 1e-10)
def _p_tensor():
    rng = np.random.default_rng(2)
    out = []
    for _ in range(20):
        theta = rng.uniform(0.05, 1.2)
        b = _unit(rng)
        w = rng.normal(size=2)
        t = perp(b)
        closed = math.sin(theta) * ((w @ b) ** 2 - (w @ t) ** 2)
        quad = arc_quadrature(theta, lambda nrm, tan: (nrm @ w) ** 2 - (tan @ w) ** 2, m=512, bisector=b)
        out.append((closed, quad))
    return _collect(out)


@pairing("area_disk_polygon~discretized", 1e-7)
def _p_area_oracle():
    polys = [build_regular_reuleaux(n) for n in (3, 5, 7)] + _instances(count=2)
    return _collect(
        (area_mod.area(p), area_mod.area_oracle_discretized(p, 10_000)) for p in polys
    )


@pairing("area_regular_closed_form~construction", 1e-12)
def _p_regular_area():
    return _collect(
        (area_mod.area_regular_reuleaux(n), area_mod.area(build_regular_reuleaux(n)))
        for n in range(3, 32, 2)
    )


@pairing("area_gradient_disk_polygon~fd", 1e-6, metric="rel")
def _p_disk_gradient():
    out = []
    for r in _instances(count=3):
        p = DiskPolygon.from_vertices(r.vertices)
        g = sens.area_gradient_disk_polygon(p)
        fd = fd_gradient(area_mod.disk_polygon_area, p.vertices)
        scale = float(np.abs(g).max())
        out.append((float(np.abs(g - fd).max()), float(np.abs(g - fd).max()) / scale))
    return max(a for a, _ in out), max(b for _, b in out), len(out)


@pairing("directional_derivative_reuleaux~constrained_fd", 1e-5, metric="rel")
def _p_directional():
    rng = np.random.default_rng(3)
    out = []
    for r in _instances():
        for _ in range(4):
            i = int(rng.integers(r.n))
            v = _unit(rng)
            out.append((sens.directional_derivative_reuleaux(r, i, v), fd_directional(area_mod.area, r, i, v)))
    return _collect(out)


@pairing("gradient_reuleaux~directional_derivative", 1e-12)
def _p_gradient():
    rng = np.random.default_rng(4)
    out = []
    for r in _instances():
        for i in range(r.n):
            v = _unit(rng)
            out.append((float(v @ sens.gradient_reuleaux(r, i)), sens.directional_derivative_reuleaux(r, i, v)))
    return _collect(out)


@pairing("directional_derivative~disk_polygon_velocity_field", 1e-12)
def _p_directional_field():
    rng = np.random.default_rng(5)
    out = []
    for r in _instances():
        i = int(rng.integers(r.n))
        v = _unit(rng)
        field = sens.vertex_velocity_field(r, i, v)
        out.append((sens.directional_derivative_reuleaux(r, i, v), sens.area_rate_disk_polygon(r.to_disk_polygon(), field)))
    return _collect(out)


@pairing("blaschke_derivative~directional_derivative", 1e-12)
def _p_blaschke():
    out = []
    for r in _instances():
        for i in range(r.n):
            out.append((sens.blaschke_derivative(r, i), sens.directional_derivative_reuleaux(r, i, sens.blaschke_direction(r, i))))
    return _collect(out)


@pairing("bisector_second_derivative~fd", 1e-4)
def _p_second():
    out = []
    for n in (5, 7, 9):
        r = build_regular_reuleaux(n)
        fd = fd_second_directional(area_mod.area, r, 0, sens.bisector(r, 0), h=1e-4)
        out.append((sens.bisector_second_derivative(math.pi / n), fd))
    return _collect(out)


@pairing("theta_rates~fd", 1e-5, metric="rel")
def _p_theta_rates():
    rng = np.random.default_rng(6)
    out = []
    for r in _instances(count=3):
        i = int(rng.integers(r.n))
        v = _unit(rng)
        _, ik, ik1 = sens._labels(r, i)
        rates = sens.theta_rates(r, i, v)
        for idx, rate in zip((i, ik, ik1), rates):
            out.append((rate, fd_directional(lambda p: p.theta[idx], r, i, v)))
    return _collect(out)


@pairing("hessian_lagrangian_vertices~fd", 1e-5)
def _p_hess_vertices():
    worst = 0.0
    for n in (5, 7, 9):
        r = build_regular_reuleaux(n)
        m = lag.solve_multipliers_vertices(r)
        analytic = lag.hessian_lagrangian_vertices(r, m).data
        fd = fd_hessian(lambda x: lag.lagrangian_vertices(x, m.values), r.vertices, h=1e-4).data
        worst = max(worst, float(np.abs(analytic - fd).max()))
    return worst, worst, 3


@pairing("hessian_area_centers~fd", 1e-5)
def _p_hess_centers():
    worst = 0.0
    for n in (5, 7, 9):
        r = build_regular_reuleaux(n)
        analytic = lag.hessian_area_centers(r.vertices).data
        fd = fd_hessian(area_mod.area_from_centers, r.vertices, h=1e-4).data
        worst = max(worst, float(np.abs(analytic - fd).max()))
    return worst, worst, 3


@pairing("gradient_centers~fd", 1e-5, metric="rel")
def _p_grad_centers():
    out = []
    for r in _instances(count=2):
        g = lag.gradient_centers(r.vertices)
        fd = fd_gradient(area_mod.area_from_centers, r.vertices)
        err = float(np.abs(g - fd).max())
        out.append((err, err / float(np.abs(g).max())))
    return max(a for a, _ in out), max(b for _, b in out), len(out)


@pairing("constraint_rank~elimination", 0.5)
def _p_rank():
    bad = 0
    polys = [build_regular_reuleaux(n) for n in (3, 5, 7, 9)] + _instances(count=2)
    for r in polys:
        if numerical_rank(lag.constraint_jacobian(r)) != r.n:
            bad += 1
    return float(bad), float(bad), len(polys)


@pairing("multipliers_vertices~closed_form", 1e-10)
def _p_mult_v():
    out = []
    for n in range(3, 16, 2):
        m = lag.solve_multipliers_vertices(build_regular_reuleaux(n))
        out.extend((float(v), -math.tan(math.pi / (2 * n))) for v in m.values)
        out.append((m.residual, 0.0))
    return _collect(out)


@pairing("blaschke_quadratic_form~closed_form", 1e-10)
def _p_qform():
    out = []
    for n in range(5, 32, 2):
        r = build_regular_reuleaux(n)
        v = lag.critical_cone_from_q(r, lag.blaschke_q(n))
        closed = 2 * math.tan(math.pi / (2 * n)) * (1 - 2 * math.cos(math.pi / n))
        out.append((lag.quadratic_form_vertices(r, v), closed))
    return _collect(out)


@pairing("opposite_vertex_velocities~constrained_fd", 1e-5, metric="rel")
def _p_opposite_velocities():
    rng = np.random.default_rng(7)
    out = []
    for r in _instances(count=3):
        i = int(rng.integers(r.n))
        v = _unit(rng)
        _, ik, ik1 = sens._labels(r, i)
        va, vb = sens.opposite_vertex_velocities(r, i, v)
        for idx, vel in ((ik, va), (ik1, vb)):
            for axis in (0, 1):
                fd = fd_directional(lambda p: p.vertices[idx, axis], r, i, v)
                out.append((float(vel[axis]), fd))
    return _collect(out)


@pairing("center_velocity~fd", 1e-6)
def _p_center_velocity():
    rng = np.random.default_rng(8)
    out = []
    h = 1e-6
    for r in _instances(count=2):
        p = DiskPolygon.from_vertices(r.vertices)
        for j, fr in enumerate(sens.arc_frames(p)):
            a, b = p.vertices[j], p.vertices[(j + 1) % p.n]
            va, vb = rng.normal(size=2), rng.normal(size=2)
            plus = circle_circle_intersection(a + h * va, b + h * vb, Side.LEFT)
            minus = circle_circle_intersection(a - h * va, b - h * vb, Side.LEFT)
            fd = (plus - minus) / (2 * h)
            closed = sens.center_velocity(fr, va, vb)
            out.extend(zip(closed, fd))
    return _collect((float(a), float(b)) for a, b in out)


@pairing("critical_angle_bound_check~chord_construction", 1e-12)
def _p_chord():
    out = []
    for theta in np.linspace(0.05, math.pi / 3, 25):
        apex = np.zeros(2)
        # the two ends of the arc opposite the apex, counter-clockwise
        lo = np.array([math.cos(-math.pi / 2 - theta / 2), math.sin(-math.pi / 2 - theta / 2)])
        hi = np.array([math.cos(-math.pi / 2 + theta / 2), math.sin(-math.pi / 2 + theta / 2)])
        nxt = hi + _rotate(apex - hi, theta)
        prv = lo + _rotate(apex - lo, -theta)
        out.append((sens.critical_angle_bound_check(theta), float(np.linalg.norm(nxt - prv))))
    return _collect(out)


def _rotate(v, ang):
    c, s = math.cos(ang), math.sin(ang)
    return np.array([c * v[0] - s * v[1], s * v[0] + c * v[1]])


@pairing("hessian_lagrangian_centers~fd", 1e-5)
def _p_hess_lag_centers():
    worst = 0.0
    for n in (5, 7, 9):
        r = build_regular_reuleaux(n)
        m = lag.solve_multipliers_centers(r)
        analytic = lag.hessian_lagrangian_centers(r, m).data
        fd = fd_hessian(lambda c: lag.lagrangian_centers(c, m.values), r.vertices, h=1e-4).data
        worst = max(worst, float(np.abs(analytic - fd).max()))
    return worst, worst, 3


@pairing("quadratic_form_blaschke_centers~second_difference", 1e-5)
def _p_center_qform():
    out = []
    h = 1e-4
    for n in (5, 7, 9, 11):
        r = build_regular_reuleaux(n)
        m = lag.solve_multipliers_centers(r)
        w = lag.blaschke_center_perturbation(r)
        c = r.vertices
        fd = (
            lag.lagrangian_centers(c + h * w, m.values)
            - 2 * lag.lagrangian_centers(c, m.values)
            + lag.lagrangian_centers(c - h * w, m.values)
        ) / (h * h)
        out.append((lag.quadratic_form_blaschke_centers(n), fd))
    return _collect(out)


@pairing("reduced_quadratic_form~vertex_hessian", 1e-10)
def _p_reduced():
    rng = np.random.default_rng(9)
    out = []
    for n in (5, 7, 9, 11):
        r = build_regular_reuleaux(n)
        for _ in range(5):
            q = lag.project_q(r, rng.normal(size=n))
            v = lag.critical_cone_from_q(r, q)
            split = lag.skew_term(v.w) + lag.reduced_quadratic_form(n, q)
            out.append((split, lag.quadratic_form_vertices(r, v)))
    return _collect(out)


def report_flags() -> dict:
    """Chosen constants and known formula discrepancies, listed in every report."""
    return {
        "delta_merge": {
            "value": DELTA_MERGE,
            "note": "vertices closer than this are merged; chosen constant, no derivation",
        },
        "opposite_arc_rate": "the rate of the arc opposite a moved vertex comes from the exact "
        "linearisation of the diameter constraints; the commonly quoted closed form with "
        "theta_1 disagrees with finite differences even at the regular polygon",
        "center_multipliers": "center-formulation multipliers at the regular n-gon equal "
        "tan(pi/(2n)), not tan(pi/n)",
        "center_blaschke_form": "the two-center quadratic form equals "
        "2 tan(pi/(2n)) (1 - 2 cos(pi/n)) for a unit move of c_0; the sign is negative for n >= 5",
    }
