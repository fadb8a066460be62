"""
Value Analysis Kit Acceptance Test Runner

Usage:
    python -m domain_kits.value_analysis.tests.run

    or

    python domain_kits/value_analysis/tests/run.py
"""

import sys
from pathlib import Path

import numpy as np

# Add parent dir to path for imports
sys.path.insert(0, str(Path(__file__).parent.parent.parent.parent))

from domain_kits.errors import PreconditionError
from domain_kits.forward_sim import TimeGrid
from domain_kits.hjb_pide import PdeGrids, SpaceGrid, ValueSurface, solve_obstacle_hjb
from domain_kits.problem_model import build_problem
from domain_kits.rbsde_solver import TREE_INSTANCES, McConfig, RegressionBasis, cost_functional, tree_value
from domain_kits.value_analysis import (
    UPPER_ESTIMATE,
    dpp_check,
    dpp_residual,
    lipschitz_mc,
    regularity_probe,
    value_mc,
)

TREE = McConfig(steps=2, enumerate_tree=True, basis=RegressionBasis.exact())
HEAT = {"sigma0": 0.5, "phi2": 1.0}


def _heat_value(t, X):
    return X[:, 0] ** 2 + 0.25 * (1.0 - t)


def test_singleton_and_irrelevant_controls():
    """Test 1: one control -> value is its cost; control-free costs tie on index 0."""
    print("\n[TEST 1] singleton and irrelevant control sets")
    cfg = McConfig(n_paths=2000, steps=10, seed=3)
    single = build_problem("lq1d", HEAT)
    est = value_mc(single, 0.0, [0.2], cfg)
    direct = cost_functional(single, 0.0, [0.2], 0, cfg)
    assert est.value == direct.value
    assert est.best == {"kind": "constant", "index": 0}
    assert est.label == UPPER_ESTIMATE and len(est.candidates) == 1

    free = build_problem("lq1d", HEAT, controls=[[-1.0], [0.0], [1.0]])
    est = value_mc(free, 0.0, [0.2], cfg)
    values = [c["value"] for c in est.candidates]
    assert values[0] == values[1] == values[2]
    assert est.best["index"] == 0
    print(f"✅ PASS: singleton value {est.value:.6f} equals its cost; ties resolve to index 0")


def test_feedback_candidate_reaches_tree_optimum():
    """Test 2: on the controlled tree the synthesized feedback beats both constants."""
    print("\n[TEST 2] value_mc with a feedback candidate on the controlled tree")
    inst = TREE_INSTANCES["controlled"]
    spec = inst.spec()
    surface = solve_obstacle_hjb(spec, PdeGrids(TimeGrid(0.0, 0.5, 100), SpaceGrid.uniform(-2.0, 2.0, 41)))
    est = value_mc(spec, 0.0, [inst.x0], TREE, surface=surface)
    optimum = tree_value(spec, inst.grid, inst.x0, policy="optimal")
    constants = [c["value"] for c in est.candidates[:2]]
    assert len(est.candidates) == 3
    assert est.best["kind"] == "feedback-policy", est.best
    assert abs(est.value - optimum) <= 1e-10, (est.value, optimum)
    assert est.value < min(constants)
    assert est.stderr == 0.0
    print(f"✅ PASS: value {est.value:.10f} = tree optimum; constants {constants}")


def test_obstacle_gap():
    """Test 3: the estimate never sits above the obstacle."""
    print("\n[TEST 3] obstacle gap")
    inst = TREE_INSTANCES["obstacle-flat"]
    est = value_mc(inst.spec(), 0.0, [inst.x0], TREE)
    assert abs(est.value - 0.5) <= 1e-10, est.value
    assert est.obstacle_gap >= -1e-12
    assert est.to_dict()["mode"] == "reflected"
    print(f"✅ PASS: value {est.value:.6f}, gap {est.obstacle_gap:.2e}")


def test_dpp_on_tree():
    """Test 4: a surface of exact tree values satisfies the one-step semigroup identity."""
    print("\n[TEST 4] dynamic programming residual on the controlled tree")
    inst = TREE_INSTANCES["controlled"]
    spec = inst.spec()
    times = TimeGrid(0.0, inst.horizon, inst.steps)
    space = SpaceGrid.uniform(-2.0, 2.0, 41)

    def exact(t, X):
        if t >= inst.horizon - 1e-12:
            return spec.terminal(X)
        rest = TimeGrid(t, inst.horizon, int(round((inst.horizon - t) / times.dt)))
        return np.array([tree_value(spec, rest, x, policy="optimal") for x in X])

    surface = ValueSurface.from_function(times, space, exact)
    one_step = McConfig(steps=1, enumerate_tree=True, basis=RegressionBasis.exact())
    check = dpp_check(spec, surface, 0.0, [inst.x0], times.dt, one_step)
    assert check["residual"] <= 1e-9, check
    assert dpp_residual(spec, surface, 0.0, [inst.x0], times.dt, one_step) == check["residual"]

    reversed_spec = spec.with_updates(controls=spec.controls[::-1].copy())
    relabeled = dpp_residual(reversed_spec, surface, 0.0, [inst.x0], times.dt, one_step)
    assert relabeled >= 0.0
    assert abs(relabeled - check["residual"]) <= 1e-12, (relabeled, check["residual"])

    full = dpp_check(spec, surface, 0.0, [inst.x0], inst.horizon, TREE)
    costs = [cost_functional(spec, 0.0, [inst.x0], j, TREE).value for j in range(spec.n_controls)]
    assert abs(full["semigroup_value"] - min(costs)) <= 1e-10, (full, costs)

    for bad in (0.0, inst.horizon + 0.1):
        try:
            dpp_check(spec, surface, 0.0, [inst.x0], bad, one_step)
            raise AssertionError(f"delta_t={bad} accepted")
        except PreconditionError:
            pass
    print(f"✅ PASS: one-step residual {check['residual']:.2e}; full horizon collapses to min_u J")


def test_dpp_closed_form():
    """Test 5: Monte Carlo semigroup on the heat problem stays within sampling error."""
    print("\n[TEST 5] dynamic programming residual, closed form")
    spec = build_problem("lq1d", HEAT)
    surface = ValueSurface.from_function(TimeGrid(0.0, 1.0, 20), SpaceGrid.uniform(-4.0, 4.0, 801), _heat_value)
    cfg = McConfig(n_paths=20000, steps=10, seed=5)
    for frac in (0.1, 0.25):
        check = dpp_check(spec, surface, 0.0, [0.5], frac * spec.horizon, cfg)
        assert check["residual"] <= 4.0 * check["stderr"] + 1e-3, check
        print(f"   delta_t={frac:.2f}: residual {check['residual']:.4f}, stderr {check['stderr']:.4f}")

    grid = [[-0.5], [0.0], [0.5]]
    forward = build_problem("lq1d", {**HEAT, "beta": 1.0}, controls=grid)
    backward = build_problem("lq1d", {**HEAT, "beta": 1.0}, controls=grid[::-1])
    small = McConfig(n_paths=4000, steps=5, seed=7)
    a = dpp_residual(forward, surface, 0.0, [0.5], 0.1, small)
    b = dpp_residual(backward, surface, 0.0, [0.5], 0.1, small)
    assert a >= 0.0 and b >= 0.0
    assert abs(a - b) <= 1e-12, (a, b)
    print(f"✅ PASS: residuals within sampling error; relabeled control grid gives {b:.6f} = {a:.6f}")


def test_regularity_probe():
    """Test 6: regularity probes on functions with known answers."""
    print("\n[TEST 6] regularity probe")
    box = (np.array([-1.0]), np.array([1.0]))

    affine = regularity_probe(lambda t, X: 2.0 * t + 3.0 * X[:, 0] - 1.0,
                              triples=1000, seed=2, box=box, time_range=(0.0, 1.0))
    assert np.max(np.abs(affine.excess)) <= 1e-6
    assert abs(affine.lipschitz_x - 3.0) <= 1e-9

    quad = regularity_probe(lambda t, X: X[:, 0] ** 2, triples=1000, seed=2, box=box, time_range=(0.0, 1.0))
    s = quad.samples
    dt, dx = np.abs(s[:, 1] - s[:, 0]), np.abs(s[:, 3] - s[:, 2])
    assert np.allclose(quad.excess, dx ** 2 / (dt ** 2 + dx ** 2), atol=1e-6)
    assert quad.semiconcavity <= 1.0 + 1e-6
    assert quad.skipped + len(quad.excess) == quad.probes == 1000

    kink = (np.array([-0.5]), np.array([0.5]))
    wide = regularity_probe(lambda t, X: np.abs(X[:, 0]), triples=4000, seed=3, radius=0.1,
                            box=kink, time_range=(0.0, 1.0))
    narrow = regularity_probe(lambda t, X: np.abs(X[:, 0]), triples=4000, seed=3, radius=0.01,
                              box=kink, time_range=(0.0, 1.0))
    assert narrow.semiconcavity > 3.0 * wide.semiconcavity, (narrow.semiconcavity, wide.semiconcavity)

    again = regularity_probe(lambda t, X: X[:, 0] ** 2, triples=1000, seed=2, box=box, time_range=(0.0, 1.0))
    other = regularity_probe(lambda t, X: X[:, 0] ** 2, triples=1000, seed=4, box=box, time_range=(0.0, 1.0))
    assert np.array_equal(again.samples, quad.samples) and again.to_dict() == quad.to_dict()
    assert not np.array_equal(other.samples, quad.samples)

    surface = ValueSurface.from_function(TimeGrid(0.0, 1.0, 20), SpaceGrid.uniform(-4.0, 4.0, 161), _heat_value)
    rep = regularity_probe(surface, triples=200, seed=1)
    assert rep.probes == 200 and abs(rep.margin - 0.1) <= 1e-12
    assert np.all(np.isfinite(rep.excess)) and rep.lipschitz_x <= 8.0 + 1e-6

    apart = regularity_probe(lambda t, X: X[:, 0] ** 2, triples=1000, seed=2, box=box, time_range=(0.0, 1.0),
                             min_separation=0.5)
    s = apart.samples
    assert np.all(np.hypot(s[:, 1] - s[:, 0], s[:, 3] - s[:, 2]) >= 0.5)
    assert apart.skipped > quad.skipped and apart.skipped + len(apart.excess) == 1000
    assert np.all(np.isin(s[:, 0], quad.samples[:, 0]))

    try:
        regularity_probe(lambda t, X: X[:, 0], triples=10)
        raise AssertionError("callable without a box accepted")
    except PreconditionError:
        pass
    print(f"✅ PASS: |x| excess grows {narrow.semiconcavity / wide.semiconcavity:.1f}x as the radius shrinks")


def test_lipschitz_mc():
    """Test 7: coupled Lipschitz ratio on the heat problem."""
    print("\n[TEST 7] coupled Lipschitz estimate")
    spec = build_problem("lq1d", HEAT)
    out = lipschitz_mc(spec, 0.0, [1.0], [1.1], McConfig(n_paths=20000, steps=10, seed=8))
    assert abs(out["ratio"] - 2.1) <= 0.05, out
    assert out["sup_stability"] >= out["ratio"] ** 2 - 1e-9
    try:
        lipschitz_mc(spec, 0.0, [1.0], [1.0], McConfig(n_paths=100, steps=2))
        raise AssertionError("identical points accepted")
    except PreconditionError:
        pass
    print(f"✅ PASS: ratio {out['ratio']:.4f} (closed form 2.1)")


def main():
    """Run all value analysis kit tests."""
    print("=" * 70)
    print("VALUE ANALYSIS KIT ACCEPTANCE TEST RUNNER")
    print("=" * 70)

    try:
        test_singleton_and_irrelevant_controls()
        test_feedback_candidate_reaches_tree_optimum()
        test_obstacle_gap()
        test_dpp_on_tree()
        test_dpp_closed_form()
        test_regularity_probe()
        test_lipschitz_mc()

        print("\n" + "=" * 70)
        print("✅ ALL TESTS PASSED")
        print("=" * 70)
        return 0

    except AssertionError as e:
        print(f"\n❌ TEST FAILED: {e}")
        return 1
    except Exception as e:
        print(f"\n❌ UNEXPECTED ERROR: {e}")
        import traceback
        traceback.print_exc()
        return 1


if __name__ == '__main__':
    sys.exit(main())
