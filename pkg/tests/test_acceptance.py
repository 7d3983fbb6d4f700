"""Release criteria at their stated tolerances, one pass/fail line each.

The lines are printed under pytest (see the terminal summary hook in
``conftest.py``) and when the file is run directly with ``python3``.
"""

import math
import sys

import pytest

from reuleaux.acceptance import CRITERIA, run_criterion

# criterion -> (metric, comparison, bound); tolerances pinned here, not
# imported from the library, so loosening them there cannot pass silently
BOUNDS = {
    1: [("closed_vs_built", "<", 1e-12), ("triangle_err", "<", 1e-13),
        ("min_increment", ">", 0.0), ("seconds", "<", 1.0)],
    2: [("directional_rel_err", "<", 1e-5), ("gradient_rel_err", "<", 1e-5), ("seconds", "<", 30.0)],
    3: [("regular_max_grad", "<", 1e-10), ("perturbed_min_grad", ">", 1e-4)],
    4: [("max_value_at_regular", "<", 0.0), ("value_at_pi_over_3", ">", 0.0), ("fd_abs_err", "<", 1e-4)],
    5: [("endpoint_err", "<", 1e-12), ("interior_min_excess", ">", 0.0)],
    6: [("vertex_multiplier_err", "<", 1e-10), ("stationarity_residual", "<", 1e-10),
        ("center_spread", "<", 1e-10), ("center_min", ">", 0.0)],
    7: [("vertex_lagrangian_err", "<", 1e-5), ("center_area_err", "<", 1e-5)],
    8: [("closed_form_err", "<", 1e-10), ("max_vertex_form", "<", 0.0), ("max_center_form", "<", 0.0)],
    9: [("maximize_err", "<", 1e-8), ("minimize_err", "<", 1e-6),
        ("largest_final_n", "==", 3.0), ("seconds", "<", 120.0)],
    10: [("closed_vs_directional", "<", 1e-12), ("derivative_at_equal_arcs", "<", 1e-12)],
}

RESULTS = []


def _holds(value, op, bound):
    if not math.isfinite(value):
        return False
    return {"<": value < bound, ">": value > bound, "==": value == bound}[op]


def test_every_criterion_is_registered():
    assert sorted(CRITERIA) == sorted(BOUNDS) == list(range(1, 11))


@pytest.mark.parametrize("number", sorted(BOUNDS))
def test_criterion(number):
    result = run_criterion(number)
    RESULTS.append(result)
    print(result.line())
    failures = [
        f"{name}={result.metrics.get(name, math.nan):.3g} (want {op} {bound:g})"
        for name, op, bound in BOUNDS[number]
        if not _holds(result.metrics.get(name, math.nan), op, bound)
    ]
    assert not failures, f"criterion {number}: " + "; ".join(failures)
    assert result.passed


if __name__ == "__main__":
    ok = True
    for n in sorted(BOUNDS):
        res = run_criterion(n)
        held = res.passed and all(_holds(res.metrics.get(k, math.nan), op, b) for k, op, b in BOUNDS[n])
        ok &= held
        print(res.line() if held else res.line().replace("[PASS]", "[FAIL]", 1))
    sys.exit(0 if ok else 1)
