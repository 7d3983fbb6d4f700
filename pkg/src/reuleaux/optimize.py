"""Area ascent and descent over Reuleaux polygons by single-vertex moves.

Each move displaces one vertex and re-seats its opposite arc, so every
iterate is an exact Reuleaux polygon. Descent removes an arc once its length
falls below ``merge_tol``, lowering ``n`` by two, until only the triangle is
left.
"""

from __future__ import annotations

import csv
import enum
import io
import logging
import math
from dataclasses import dataclass, field

import numpy as np

from .area import area
from .errors import NonOddReduction, StallError, StepTooLarge, TriangleImmovable
from .geometry import (
    DELTA_MERGE,
    ReuleauxPolygon,
    build_regular_reuleaux,
    nearest_intersection,
    validate_constant_width,
)
from .sensitivity import (
    _checked_reuleaux,
    bisector,
    gradient_field_reuleaux,
    gradient_reuleaux,
    propagate_vertex_perturbation,
)

logger = logging.getLogger(__name__)

MIN_STEP = 1e-14


class Mode(str, enum.Enum):
    MAXIMIZE = "maximize"
    MINIMIZE = "minimize"


class Classification(str, enum.Enum):
    REGULAR_MAX_CANDIDATE = "regular_max_candidate"
    TRIANGLE = "triangle"
    NON_CRITICAL = "non_critical"


@dataclass(frozen=True)
class OptimizeConfig:
    mode: Mode = Mode.MAXIMIZE
    step0: float = 1.0
    shrink: float = 0.5
    max_iters: int = 2000
    grad_tol: float = 1e-7
    merge_tol: float = 1e-5

    def __post_init__(self):
        object.__setattr__(self, "mode", Mode(self.mode))
        if self.step0 <= 0 or self.grad_tol <= 0:
            raise ValueError("step0 and grad_tol must be positive")
        if not 0.0 < self.shrink < 1.0:
            raise ValueError("shrink must lie in (0, 1)")
        if self.merge_tol < DELTA_MERGE:
            raise ValueError(f"merge_tol must be at least {DELTA_MERGE}")


@dataclass(frozen=True)
class TraceRecord:
    iter: int
    n: int
    area: float
    grad_norm: float
    theta_min: float
    theta_max: float
    constraint_residual: float = 0.0


@dataclass
class Trace:
    records: list[TraceRecord] = field(default_factory=list)

    def append(self, it: int, r: ReuleauxPolygon) -> None:
        g = 0.0 if r.n == 3 else float(np.linalg.norm(gradient_field_reuleaux(r), axis=1).max())
        residual = validate_constant_width(r.vertices).max_residual
        self.records.append(
            TraceRecord(it, r.n, area(r), g, float(r.theta.min()), float(r.theta.max()), residual)
        )

    @property
    def areas(self) -> np.ndarray:
        return np.array([rec.area for rec in self.records])

    def __len__(self) -> int:
        return len(self.records)

    def to_csv(self) -> str:
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(["iter", "n", "area", "grad_norm", "theta_min", "theta_max"])
        for rec in self.records:
            writer.writerow(
                [rec.iter, rec.n, repr(rec.area), repr(rec.grad_norm),
                 repr(rec.theta_min), repr(rec.theta_max)]
            )
        return buf.getvalue()


def _feasible_step(r, i, step, direction, shrink=0.5):
    t = float(step)
    while t >= MIN_STEP:
        try:
            return propagate_vertex_perturbation(r, i, direction, t), t
        except StepTooLarge:
            t *= shrink
    raise StallError(f"no feasible step above {MIN_STEP} at vertex {i}")


def step_vertex(r: ReuleauxPolygon, i: int, step: float, direction) -> ReuleauxPolygon:
    """Move vertex ``i`` by ``step`` along ``direction``, halving until feasible."""
    if r.n == 3:
        raise TriangleImmovable("the Reuleaux triangle has no admissible vertex move")
    if step == 0.0 or not np.any(direction):
        return r
    return _feasible_step(r, i, step, direction)[0]


def _snap(r: ReuleauxPolygon, i: int, keep_lower: bool) -> ReuleauxPolygon:
    """Collapse the arc opposite vertex ``i`` and drop the redundant vertices."""
    n, k = r.n, r.k
    x = np.array(r.vertices)
    a, b = (i + k) % n, (i + k + 1) % n
    if keep_lower:
        # slide x_b onto x_a around x_i; x_{i+1} is re-seated
        x[b] = x[a]
        moved, anchor = (i + 1) % n, (b + 1) % n
        x[moved], _ = nearest_intersection(x[a], x[anchor], r.vertices[moved])
        drop = {i, b}
    else:
        x[a] = x[b]
        moved, anchor = (i - 1) % n, (a - 1) % n
        x[moved], _ = nearest_intersection(x[b], x[anchor], r.vertices[moved])
        drop = {i, a}
    y = np.array([x[m] for m in range(n) if m not in drop])
    if len(y) % 2 == 0:
        raise NonOddReduction(f"merging produced {len(y)} vertices")
    if len(y) == 3:
        return ReuleauxPolygon.from_vertices(y)
    return _checked_reuleaux(y, f"merge at vertex {i}")


def merge_collapsed_arc(r: ReuleauxPolygon, i: int) -> ReuleauxPolygon:
    """Remove the (short) arc opposite ``i``; returns the smaller-area variant."""
    options = []
    for keep_lower in (True, False):
        try:
            options.append(_snap(r, i, keep_lower))
        except (StepTooLarge, ValueError) as exc:
            logger.debug("merge variant rejected: %s", exc)
    if not options:
        raise StallError(f"cannot collapse the arc opposite vertex {i}")
    return min(options, key=area)


def _better(new: float, old: float, mode: Mode) -> bool:
    return new > old if mode is Mode.MAXIMIZE else new < old


def run(r0: ReuleauxPolygon, cfg: OptimizeConfig | None = None) -> tuple[ReuleauxPolygon, Trace]:
    """Cyclic single-vertex ascent or descent.

    Every accepted move strictly improves the area. Per-vertex steps are
    ``alpha_i * |g_i|`` with ``alpha_i`` grown after success and shrunk on
    failure. Maximisation stops when all vertex gradients drop below
    ``grad_tol``; minimisation stops at the triangle.
    """
    cfg = cfg or OptimizeConfig()
    mode = cfg.mode
    r = r0
    trace = Trace()
    trace.append(0, r)
    alpha = np.full(r.n, cfg.step0)
    current = area(r)
    for it in range(1, cfg.max_iters + 1):
        if r.n == 3:
            break
        if mode is Mode.MINIMIZE and r.theta.min() < cfg.merge_tol:
            i = int(np.argmin(r.theta))
            candidate = merge_collapsed_arc(r, i)
            new = area(candidate)
            if new <= current:
                r, current = candidate, new
                alpha = np.full(r.n, cfg.step0)
                trace.append(it, r)
                continue
        grads = gradient_field_reuleaux(r)
        norms = np.linalg.norm(grads, axis=1)
        if mode is Mode.MAXIMIZE and norms.max() < cfg.grad_tol:
            break
        improved = False
        for i in range(r.n):
            g = gradient_reuleaux(r, i)
            gn = float(np.linalg.norm(g))
            if gn < cfg.grad_tol:
                if mode is Mode.MAXIMIZE:
                    continue
                # critical vertex: area is concave along the bisector
                direction, scale = bisector(r, i), cfg.grad_tol
            else:
                direction = g / gn if mode is Mode.MAXIMIZE else -g / gn
                scale = gn
            t = alpha[i] * scale
            while t >= MIN_STEP:
                try:
                    cand, t_used = _feasible_step(r, i, t, direction, cfg.shrink)
                except StallError:
                    break
                new = area(cand)
                if _better(new, current, mode):
                    r, current = cand, new
                    alpha[i] = min(4.0 * cfg.step0, 1.5 * t_used / scale)
                    improved = True
                    break
                t = t_used * cfg.shrink
            else:
                alpha[i] = max(alpha[i] * cfg.shrink, 1e-6)
            if mode is Mode.MINIMIZE and r.theta.min() < cfg.merge_tol:
                break
        trace.append(it, r)
        if not improved and not (mode is Mode.MINIMIZE and r.theta.min() < cfg.merge_tol):
            if mode is Mode.MAXIMIZE and trace.records[-1].grad_norm < 1e2 * cfg.grad_tol:
                logger.info("ascent stopped at roundoff level, |g| = %.3e", trace.records[-1].grad_norm)
                break
            raise StallError(f"no improving move at iteration {it} (n={r.n})")
    return r, trace


def classify_critical(r: ReuleauxPolygon, tol: float = 1e-8) -> Classification:
    if r.n == 3:
        return Classification.TRIANGLE
    norms = np.linalg.norm(gradient_field_reuleaux(r), axis=1)
    if norms.max() < tol:
        return Classification.REGULAR_MAX_CANDIDATE
    return Classification.NON_CRITICAL


def random_reuleaux(
    n: int,
    rng: np.random.Generator | int | None = None,
    steps: int | None = None,
    scale: float = 0.05,
    min_theta_frac: float = 0.2,
) -> ReuleauxPolygon:
    """Random Reuleaux ``n``-gon reached from the regular one by feasible moves.

    Every arc keeps at least ``min_theta_frac * pi / n`` of length so that
    instances stay away from vertex merging.
    """
    rng = np.random.default_rng(rng)
    r = build_regular_reuleaux(n)
    if n == 3:
        return r
    floor = min_theta_frac * math.pi / n
    steps = 3 * n if steps is None else steps
    done = 0
    attempts = 0
    while done < steps and attempts < 50 * steps:
        attempts += 1
        i = int(rng.integers(n))
        ang = rng.uniform(0.0, 2.0 * math.pi)
        v = np.array([math.cos(ang), math.sin(ang)])
        t = scale * rng.uniform(0.5, 1.0)
        try:
            cand = propagate_vertex_perturbation(r, i, v, t)
        except StepTooLarge:
            continue
        if cand.theta.min() < floor:
            continue
        r = cand
        done += 1
    return r
