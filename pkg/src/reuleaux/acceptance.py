"""The ten release criteria, each returning its measured errors and a verdict.

``run_all`` is what ``reuleaux certify`` executes after the oracle pairings;
``tests/test_acceptance.py`` re-checks the returned metrics against its own
pinned tolerances.
"""

from __future__ import annotations

import importlib
import math
import time
from dataclasses import dataclass, field
from typing import Callable

import numpy as np
from scipy.optimize import brentq

from . import lagrangian as lag
from . import sensitivity as sens
from .geometry import build_regular_reuleaux
from .optimize import Mode, OptimizeConfig, random_reuleaux, run
from .verify import fd_directional, fd_hessian, fd_second_directional

area_mod = importlib.import_module(".area", __package__)

TRIANGLE_AREA = (math.pi - math.sqrt(3.0)) / 2.0


@dataclass
class CriterionResult:
    number: int
    title: str
    passed: bool
    metrics: dict[str, float] = field(default_factory=dict)
    seconds: float = 0.0

    def line(self) -> str:
        status = "PASS" if self.passed else "FAIL"
        shown = ", ".join(f"{k}={v:.3g}" for k, v in self.metrics.items())
        return f"[{status}] {self.number:2d} {self.title} ({self.seconds:.2f}s) {shown}"

    def to_dict(self) -> dict:
        return {
            "criterion": self.number,
            "title": self.title,
            "pass": self.passed,
            "seconds": self.seconds,
            "metrics": {k: float(v) for k, v in self.metrics.items()},
        }


CRITERIA: dict[int, tuple[str, Callable[[], tuple[bool, dict]]]] = {}


def criterion(number: int, title: str):
    def deco(fn):
        CRITERIA[number] = (title, fn)
        return fn

    return deco


def run_criterion(number: int) -> CriterionResult:
    title, fn = CRITERIA[number]
    start = time.perf_counter()
    try:
        ok, metrics = fn()
    except Exception as exc:
        return CriterionResult(number, f"{title}: error {exc!r}", False, {}, time.perf_counter() - start)
    return CriterionResult(number, title, bool(ok), metrics, time.perf_counter() - start)


def run_all(numbers=None) -> list[CriterionResult]:
    return [run_criterion(n) for n in sorted(numbers or CRITERIA)]


def _rel(a: float, b: float) -> float:
    return abs(a - b) / abs(b)


def _unit(rng) -> np.ndarray:
    a = rng.uniform(0.0, 2.0 * math.pi)
    return np.array([math.cos(a), math.sin(a)])


def _max_vertex_grad(r) -> float:
    return float(np.linalg.norm(sens.gradient_field_reuleaux(r), axis=1).max())


@criterion(1, "regular areas")
def regular_areas():
    start = time.perf_counter()
    closed_vs_built = max(
        abs(area_mod.area_regular_reuleaux(n) - area_mod.area(build_regular_reuleaux(n)))
        for n in range(3, 32, 2)
    )
    triangle = abs(area_mod.area_regular_reuleaux(3) - TRIANGLE_AREA)
    seq = np.array([a for _, a in area_mod.sweep_regular_areas(101)])
    min_gap = float(np.diff(seq).min())
    seconds = time.perf_counter() - start
    ok = closed_vs_built < 1e-12 and triangle < 1e-13 and min_gap > 0 and seconds < 1.0
    return ok, {"closed_vs_built": closed_vs_built, "triangle_err": triangle,
                "min_increment": min_gap, "seconds": seconds}


@criterion(2, "gradient certification against constrained FD")
def gradient_certification(instances: int = 200, directions: int = 8, seed: int = 11):
    start = time.perf_counter()
    rng = np.random.default_rng(seed)
    worst_dd = worst_grad = 0.0
    for j in range(instances):
        r = random_reuleaux(7 if j % 2 == 0 else 9, rng)
        for _ in range(directions):
            i = int(rng.integers(r.n))
            v = _unit(rng)
            fd = fd_directional(area_mod.area, r, i, v)
            worst_dd = max(worst_dd, _rel(sens.directional_derivative_reuleaux(r, i, v), fd))
            worst_grad = max(worst_grad, _rel(float(v @ sens.gradient_reuleaux(r, i)), fd))
    seconds = time.perf_counter() - start
    ok = worst_dd < 1e-5 and worst_grad < 1e-5 and seconds < 30.0
    return ok, {"directional_rel_err": worst_dd, "gradient_rel_err": worst_grad,
                "seconds": seconds}


@criterion(3, "only regular polygons are critical")
def criticality(perturbed: int = 100, seed: int = 12):
    regular = max(_max_vertex_grad(build_regular_reuleaux(n)) for n in range(5, 16, 2))
    rng = np.random.default_rng(seed)
    ns = (5, 7, 9, 11, 13, 15)
    weakest = min(
        _max_vertex_grad(random_reuleaux(ns[j % len(ns)], rng)) for j in range(perturbed)
    )
    return regular < 1e-10 and weakest > 1e-4, {
        "regular_max_grad": regular, "perturbed_min_grad": weakest}


@criterion(4, "second-order signs along the bisector")
def second_order():
    at_regular = max(sens.bisector_second_derivative(math.pi / n) for n in range(5, 202, 2))
    at_third = sens.bisector_second_derivative(math.pi / 3)
    fd_err = 0.0
    for n in (5, 7, 9):
        r = build_regular_reuleaux(n)
        fd = fd_second_directional(area_mod.area, r, 0, sens.bisector(r, 0), h=1e-4)
        fd_err = max(fd_err, abs(fd - sens.bisector_second_derivative(math.pi / n)))
    ok = at_regular < 0 and at_third > 0 and fd_err < 1e-4
    return ok, {"max_value_at_regular": at_regular, "value_at_pi_over_3": at_third,
                "fd_abs_err": fd_err}


@criterion(5, "critical-angle window")
def critical_window():
    ends = max(abs(sens.critical_angle_bound_check(t) - 1.0) for t in (math.pi / 5, math.pi / 3))
    grid = np.linspace(math.pi / 5, math.pi / 3, 1002)[1:-1]
    inside = min(sens.critical_angle_bound_check(t) for t in grid) - 1.0
    return ends < 1e-12 and inside > 0, {"endpoint_err": ends, "interior_min_excess": inside}


@criterion(6, "Lagrange multipliers")
def multipliers():
    lam_err = resid = 0.0
    spread = 0.0
    min_center = math.inf
    for n in range(3, 32, 2):
        r = build_regular_reuleaux(n)
        m = lag.solve_multipliers_vertices(r)
        lam_err = max(lam_err, float(np.abs(m.values + math.tan(math.pi / (2 * n))).max()))
        resid = max(resid, m.residual)
        mc = lag.solve_multipliers_centers(r)
        spread = max(spread, float(np.ptp(mc.values)))
        min_center = min(min_center, float(mc.values.min()))
    ok = lam_err < 1e-10 and resid < 1e-10 and spread < 1e-10 and min_center > 0
    return ok, {"vertex_multiplier_err": lam_err, "stationarity_residual": resid,
                "center_spread": spread, "center_min": min_center}


@criterion(7, "Hessian oracles")
def hessians():
    err_v = err_c = 0.0
    for n in (5, 7, 9):
        r = build_regular_reuleaux(n)
        m = lag.solve_multipliers_vertices(r)
        fd_v = fd_hessian(lambda x: lag.lagrangian_vertices(x, m.values), r.vertices, h=1e-4)
        err_v = max(err_v, float(np.abs(lag.hessian_lagrangian_vertices(r, m).data - fd_v.data).max()))
        fd_c = fd_hessian(area_mod.area_from_centers, r.vertices, h=1e-4)
        err_c = max(err_c, float(np.abs(lag.hessian_area_centers(r.vertices).data - fd_c.data).max()))
    return err_v < 1e-5 and err_c < 1e-5, {"vertex_lagrangian_err": err_v,
                                             "center_area_err": err_c}


@criterion(8, "regular polygons are not local minima")
def non_minimality():
    closed_err = 0.0
    worst_vertex = worst_center = -math.inf
    for n in range(5, 32, 2):
        r = build_regular_reuleaux(n)
        qf = lag.quadratic_form_vertices(r, lag.critical_cone_from_q(r, lag.blaschke_q(n)))
        closed = 2 * math.tan(math.pi / (2 * n)) * (1 - 2 * math.cos(math.pi / n))
        closed_err = max(closed_err, abs(qf - closed))
        worst_vertex = max(worst_vertex, qf)
        worst_center = max(worst_center, lag.quadratic_form_blaschke_centers(n))
    ok = closed_err < 1e-10 and worst_vertex < 0 and worst_center < 0
    return ok, {"closed_form_err": closed_err, "max_vertex_form": worst_vertex,
                "max_center_form": worst_center}


@criterion(9, "optimization endpoints")
def optimization(starts: int = 20, seed: int = 13):
    start = time.perf_counter()
    rng = np.random.default_rng(seed)
    target = area_mod.area_regular_reuleaux(7)
    max_err = min_err = 0.0
    min_final_n = 3
    for _ in range(starts):
        r0 = random_reuleaux(7, rng)
        rmax, _ = run(r0, OptimizeConfig(mode=Mode.MAXIMIZE))
        max_err = max(max_err, abs(area_mod.area(rmax) - target))
        rmin, _ = run(r0, OptimizeConfig(mode=Mode.MINIMIZE))
        min_final_n = max(min_final_n, rmin.n)
        min_err = max(min_err, abs(area_mod.area(rmin) - TRIANGLE_AREA))
    seconds = time.perf_counter() - start
    ok = max_err < 1e-8 and min_final_n == 3 and min_err < 1e-6 and seconds < 120.0
    return ok, {"maximize_err": max_err, "minimize_err": min_err,
                "largest_final_n": float(min_final_n), "seconds": seconds}


def equalize_blaschke_pair(r, i: int = 0):
    """Move vertex ``i`` along its initial gradient until ``theta_i = theta_{i+k+1}``.

    Returns ``None`` when no sign change of the Blaschke derivative is found
    inside the feasible step range.
    """
    d = sens.gradient_reuleaux(r, i)
    d = d / np.linalg.norm(d)

    def g(t):
        return sens.blaschke_derivative(sens.propagate_vertex_perturbation(r, i, d, t), i)

    g0 = g(0.0)
    t = 0.01
    while t < 0.5:
        try:
            gt = g(t)
        except ValueError:
            return None
        if gt * g0 <= 0:
            root = brentq(g, 0.0, t, xtol=1e-15, rtol=4 * np.finfo(float).eps)
            return sens.propagate_vertex_perturbation(r, i, d, root)
        t *= 1.5
    return None


@criterion(10, "Blaschke derivative consistency")
def blaschke_consistency(instances: int = 100, seed: int = 14):
    rng = np.random.default_rng(seed)
    agree = 0.0
    for j in range(instances):
        r = random_reuleaux((5, 7, 9)[j % 3], rng)
        i = int(rng.integers(r.n))
        direct = sens.directional_derivative_reuleaux(r, i, sens.blaschke_direction(r, i))
        agree = max(agree, abs(sens.blaschke_derivative(r, i) - direct))
    balanced = [build_regular_reuleaux(n) for n in (5, 7, 9)]
    while len(balanced) < 13:
        found = equalize_blaschke_pair(random_reuleaux(7, rng))
        if found is not None:
            balanced.append(found)
    at_equal = 0.0
    theta_gap = 0.0
    for r in balanced:
        theta_gap = max(theta_gap, abs(r.theta[0] - r.theta[r.k + 1]))
        at_equal = max(at_equal, abs(sens.blaschke_derivative(r, 0)))
    ok = agree < 1e-12 and at_equal < 1e-12
    return ok, {"closed_vs_directional": agree, "derivative_at_equal_arcs": at_equal,
                "theta_gap": theta_gap}
