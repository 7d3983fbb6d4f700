"""Polygon JSON, generator specs and SVG output."""

from __future__ import annotations

import json
import re
from pathlib import Path

import numpy as np

from .errors import ParseError, ReuleauxError
from .geometry import TAU_CW, ReuleauxPolygon, build_regular_reuleaux
from .optimize import random_reuleaux
from .sensitivity import gradient_field_reuleaux

DEFAULT_SCALE = 300.0

_SPEC = re.compile(r"^(regular|random):(\d+)(?::seed=(-?\d+))?$")


def polygon_to_dict(r: ReuleauxPolygon) -> dict:
    return {"n": r.n, "vertices": [[float(a), float(b)] for a, b in r.vertices]}


def polygon_from_dict(data, tol: float = TAU_CW) -> ReuleauxPolygon:
    """Validate ``{"n": int, "vertices": [[x, y], ...]}`` and build the polygon."""
    if not isinstance(data, dict) or "vertices" not in data:
        raise ParseError('expected an object with a "vertices" list')
    try:
        pts = np.array(data["vertices"], dtype=float)
    except (TypeError, ValueError) as exc:
        raise ParseError(f"vertices are not numeric pairs: {exc}") from exc
    if pts.ndim != 2 or pts.shape[1] != 2:
        raise ParseError(f"vertices must have shape (n, 2), got {pts.shape}")
    if "n" in data and data["n"] != len(pts):
        raise ParseError(f'"n" is {data["n"]!r} but {len(pts)} vertices were given')
    return ReuleauxPolygon.from_vertices(pts, tol=tol)


def load_polygon(path, tol: float = TAU_CW) -> ReuleauxPolygon:
    try:
        data = json.loads(Path(path).read_text())
    except json.JSONDecodeError as exc:
        raise ParseError(f"{path}: malformed JSON ({exc})") from exc
    except OSError as exc:
        raise ParseError(f"{path}: {exc.strerror}") from exc
    return polygon_from_dict(data, tol)


def save_polygon(r: ReuleauxPolygon, path) -> None:
    Path(path).write_text(json.dumps(polygon_to_dict(r), indent=2) + "\n")


def resolve_polygon(source: str, seed: int = 0, tol: float = TAU_CW) -> ReuleauxPolygon:
    """Polygon from a JSON path or a generator spec ``regular:N`` / ``random:N[:seed=S]``."""
    m = _SPEC.match(source)
    if m is None:
        if ":" in source and not Path(source).exists():
            raise ParseError(f"unrecognised generator spec {source!r}")
        return load_polygon(source, tol)
    kind, n = m.group(1), int(m.group(2))
    try:
        if kind == "regular":
            return build_regular_reuleaux(n)
        return random_reuleaux(n, int(m.group(3)) if m.group(3) else seed)
    except ReuleauxError as exc:
        raise ParseError(f"{source}: {exc}") from exc


def _svg_xy(p, scale: float, origin: np.ndarray) -> str:
    return f"{(p[0] - origin[0]) * scale:.6f},{(origin[1] - p[1]) * scale:.6f}"


def render_svg(r: ReuleauxPolygon, scale: float = DEFAULT_SCALE, show_gradient: bool = False) -> str:
    """SVG drawing with every boundary arc as a true circular arc of radius ``scale``.

    With ``show_gradient`` one ``gradient-arrow`` line is drawn per vertex
    whose area gradient is nonzero, longest arrow a quarter of the width.
    """
    if scale <= 0:
        raise ValueError("scale must be positive")
    x = r.vertices
    # arcs bulge at most 1 - cos(pi/6) < 0.14 beyond the vertex hull
    pad = 0.25
    lo = x.min(axis=0) - pad
    hi = x.max(axis=0) + pad
    origin = np.array([lo[0], hi[1]])
    width, height = (hi - lo) * scale
    # after flipping y, counter-clockwise arcs are drawn with sweep-flag 0
    rad = f"{scale:.6f}"
    parts = [f"M {_svg_xy(x[0], scale, origin)}"]
    for j in range(1, r.n + 1):
        parts.append(f"A {rad} {rad} 0 0 0 {_svg_xy(x[j % r.n], scale, origin)}")
    lines = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{width:.3f}" height="{height:.3f}" '
        f'viewBox="0 0 {width:.3f} {height:.3f}">',
        f'  <path class="boundary" d="{" ".join(parts)} Z" fill="#e8eef7" stroke="#1f3b73" '
        f'stroke-width="{scale / 150:.3f}"/>',
    ]
    for i, p in enumerate(x):
        cx, cy = _svg_xy(p, scale, origin).split(",")
        lines.append(f'  <circle class="vertex" data-index="{i}" cx="{cx}" cy="{cy}" '
                     f'r="{scale / 60:.3f}" fill="#1f3b73"/>')
    if show_gradient and r.n > 3:
        grads = gradient_field_reuleaux(r)
        norms = np.linalg.norm(grads, axis=1)
        longest = float(norms.max())
        for i, (p, g, gn) in enumerate(zip(x, grads, norms)):
            if gn <= 1e-12 * max(1.0, longest):
                continue
            tip = p + 0.25 * g / longest
            (x1, y1), (x2, y2) = (_svg_xy(q, scale, origin).split(",") for q in (p, tip))
            lines.append(f'  <line class="gradient-arrow" data-index="{i}" x1="{x1}" y1="{y1}" '
                         f'x2="{x2}" y2="{y2}" stroke="#c0392b" stroke-width="{scale / 200:.3f}"/>')
    lines.append("</svg>")
    return "\n".join(lines) + "\n"


def sweep_csv(rows) -> str:
    return "n,A_n\n" + "".join(f"{n},{a!r}\n" for n, a in rows)


def dumps(obj) -> str:
    return json.dumps(obj, indent=2, default=_jsonable) + "\n"


def _jsonable(o):
    if isinstance(o, np.ndarray):
        return o.tolist()
    if isinstance(o, np.generic):
        return o.item()
    raise TypeError(f"cannot serialise {type(o).__name__}")
