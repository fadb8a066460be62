"""
RBSDE Solver Kit Acceptance Test Runner

Usage:
    python -m domain_kits.rbsde_solver.tests.run
"""

import sys
from pathlib import Path

import numpy as np

# Add parent dir to path for imports
sys.path.insert(0, str(Path(__file__).parent.parent.parent.parent))

from domain_kits.errors import PreconditionError, SingularDesignError
from domain_kits.forward_sim import FeedbackControl, TimeGrid, simulate
from domain_kits.problem_model import build_problem
from domain_kits.rbsde_solver import (
    TREE_INSTANCES,
    RegressionBasis,
    apriori_report,
    comparison_check,
    enumerate_policies,
    obstacle_excess,
    penalization_ladder,
    skorokhod_residual,
    solve_penalized,
    solve_reflected,
    solve_step,
    tree_ensemble,
    tree_value,
)

EXACT = RegressionBasis.exact()
POLY = RegressionBasis.polynomial(3)


def test_zero_problem():
    """Test 1: f=0, Phi=0, h=1 gives identically zero processes."""
    print("\n[TEST 1] zero problem")
    spec = build_problem("zero", {"h_const": 1.0})
    ens = simulate(spec, TimeGrid(0.0, 1.0, 10), [0.0], 0, n_paths=100, seed=1)
    for n in (0.0, 10.0):
        sol = solve_penalized(ens, spec, n, POLY)
        for arr in (sol.Y, sol.Z, sol.Gamma, sol.A):
            assert np.all(arr == 0.0)
    print("✅ PASS: Y = Z = Gamma = A = 0")


def test_constant_driver():
    """Test 2: f=c with an inactive obstacle gives Y_k = c (T - s_k)."""
    print("\n[TEST 2] deterministic linear BSDE")
    c = 0.7
    spec = build_problem("zero", {"f_const": c, "h_const": 1e6})
    ens = simulate(spec, TimeGrid(0.0, 1.0, 20), [0.0], 0, n_paths=30, seed=2)
    sol = solve_penalized(ens, spec, 5.0, POLY)
    expected = c * (1.0 - ens.grid.nodes)
    assert np.max(np.abs(sol.Y - expected[None, :])) <= 1e-12
    print(f"✅ PASS: Y_0 = {sol.y0:.12f}")


def test_tree_oracle_equivalence():
    """Test 3: exact-basis solver equals brute-force DP on every tree instance."""
    print("\n[TEST 3] tree oracle")
    for name, inst in TREE_INSTANCES.items():
        spec = inst.spec()
        ens = tree_ensemble(spec, inst.grid, [inst.x0], 0)
        refl = solve_reflected(ens, spec, EXACT)
        dp_refl = tree_value(spec, inst.grid, [inst.x0], "reflected", policy=0)
        assert abs(refl.y0 - dp_refl) <= 1e-10, (name, refl.y0, dp_refl)
        for n in (1.0, 16.0):
            pen = solve_penalized(ens, spec, n, EXACT)
            dp_pen = tree_value(spec, inst.grid, [inst.x0], "penalized", n=n, policy=0)
            assert abs(pen.y0 - dp_pen) <= 1e-10, (name, n, pen.y0, dp_pen)
        print(f"  ✅ {name:16} Y0={refl.y0:.12f}")
    print("✅ PASS: solver matches enumeration to 1e-10")


def test_inactive_obstacle_bitwise():
    """Test 4: reflected with h = 1e6 equals penalized n = 0 bit for bit."""
    print("\n[TEST 4] inactive obstacle")
    spec = build_problem("lq1d", {"sigma0": 0.5, "a": -0.2, "fy": 0.3, "fx": 0.1, "phi2": 1.0})
    ens = simulate(spec, TimeGrid(0.0, 1.0, 20), [0.5], 0, n_paths=2000, seed=4)
    r = solve_reflected(ens, spec, POLY)
    p = solve_penalized(ens, spec, 0.0, POLY)
    assert np.array_equal(r.Y, p.Y) and np.array_equal(r.Z, p.Z)
    assert np.all(r.A == 0.0)
    print("✅ PASS: identical arrays, A = 0")


def test_projection_step():
    """Test 5: Phi=1, h=0: projected to 0 before T, push of 1 at the first backward step."""
    print("\n[TEST 5] one projection step")
    spec = build_problem("zero", {"phi_const": 1.0, "h_const": 0.0})
    ens = simulate(spec, TimeGrid(0.0, 1.0, 5), [0.0], 0, n_paths=50, seed=5)
    sol = solve_reflected(ens, spec, POLY)
    K = ens.grid.steps
    assert np.all(sol.Y[:, :K] == 0.0) and np.all(sol.Y[:, K] == 1.0)
    assert np.allclose(sol.dA[:, K - 1], 1.0, atol=1e-12)
    assert np.all(sol.dA[:, : K - 1] == 0.0)
    assert skorokhod_residual(sol, ens, spec) == 0.0
    assert np.all(np.diff(sol.A, axis=1) >= 0.0) and np.all(sol.A[:, 0] == 0.0)
    print("✅ PASS: dA_{K-1} = 1, Skorokhod residual 0")


def test_tree_obstacle_values():
    """Test 6: flat obstacle tree has root value 0.5; complementarity on the active tree."""
    print("\n[TEST 6] tree obstacle instances")
    inst = TREE_INSTANCES["obstacle-flat"]
    spec = inst.spec()
    ens = tree_ensemble(spec, inst.grid, [inst.x0])
    sol = solve_reflected(ens, spec, EXACT)
    assert abs(sol.y0 - 0.5) <= 1e-10 and abs(tree_value(spec, inst.grid, [inst.x0]) - 0.5) <= 1e-12

    inst = TREE_INSTANCES["obstacle-active"]
    spec = inst.spec()
    ens = tree_ensemble(spec, inst.grid, [inst.x0])
    sol = solve_reflected(ens, spec, EXACT)
    assert np.max(sol.dA) > 0.0
    assert abs(skorokhod_residual(sol, ens, spec)) <= 1e-10
    assert obstacle_excess(sol, ens, spec) <= 1e-9
    print("✅ PASS: Y0 = 0.5; active tree complementarity holds")


def test_ladder():
    """Test 7: penalized values decrease in n towards the reflected value."""
    print("\n[TEST 7] penalization ladder")
    inst = TREE_INSTANCES["obstacle-active"]
    spec = inst.spec()
    ens = tree_ensemble(spec, inst.grid, [inst.x0])
    levels = [1, 2, 4, 8, 16, 32, 64, 128, 256]
    lad = penalization_ladder(ens, spec, levels, EXACT)
    y0 = [s.y0 for s in lad.solutions]
    assert all(b <= a + 1e-12 for a, b in zip(y0, y0[1:])), y0
    assert lad.max_increase <= 1e-12
    gaps = [y - lad.reflected.y0 for y in y0]
    C = max(levels[-1] * gaps[-1], levels[-2] * gaps[-2])
    for n, g in zip(levels, gaps):
        assert -1e-12 <= g <= C / n * (1 + 1e-9) + 1e-12, (n, g, C)
    assert list(lad.table.columns)[:4] == ["n", "sup_gap_to_reflected", "sup_gap_to_next_level", "mc_stderr"]

    # Phi=0, f=0, h=-1: every step solves (1 + n dt) Y = Y_next - n dt
    spec = build_problem("zero", {"h_const": -1.0})
    ens = simulate(spec, TimeGrid(0.0, 1.0, 10), [0.0], 0, n_paths=20, seed=7)
    lad = penalization_ladder(ens, spec, levels, POLY)
    dt = ens.grid.dt
    for n, sol in zip(levels, lad.solutions):
        y = 0.0
        for _ in range(ens.grid.steps):
            y = (y + dt * n * -1.0) / (1.0 + dt * n)
        assert abs(sol.y0 - y) <= 1e-12, (n, sol.y0, y)
    inactive = build_problem("lq1d", {"sigma0": 1.0, "phi2": 1.0})
    ens = simulate(inactive, TimeGrid(0.0, 1.0, 10), [0.0], 0, n_paths=500, seed=8)
    lad = penalization_ladder(ens, inactive, [0, 1, 10], POLY)
    assert all(np.array_equal(s.Y, lad.solutions[0].Y) for s in lad.solutions)
    print(f"✅ PASS: monotone ladder, C ~ {C:.4f}, closed-form per-step fixed point matched")


def test_comparison():
    """Test 8: ordered data gives ordered solutions on shared noise."""
    print("\n[TEST 8] comparison")
    base = {"sigma0": 1.0, "a": -0.3, "phi2": 0.5, "fx": 0.2}
    s1 = build_problem("lq1d", base)
    ens = simulate(s1, TimeGrid(0.0, 1.0, 50), [0.2], 0, n_paths=4000, seed=9)
    same = comparison_check(ens, s1, s1, POLY)
    assert same["fraction"] == 0.0

    s2 = build_problem("lq1d", dict(base, phi0=1.0))
    rep = comparison_check(ens, s1, s2, POLY)
    assert rep["fraction"] == 0.0 and abs(rep["y0_gap"] - 1.0) <= 1e-9, rep["y0_gap"]

    fy = 0.5
    s1y = build_problem("lq1d", dict(base, fy=fy))
    s2y = build_problem("lq1d", dict(base, fy=fy, phi0=1.0))
    rep = comparison_check(ens, s1y, s2y, POLY)
    discrete = (1.0 - ens.grid.dt * fy) ** (-ens.grid.steps)
    assert abs(rep["y0_gap"] - discrete) <= 1e-8, (rep["y0_gap"], discrete)
    assert abs(rep["y0_gap"] - np.exp(fy * 1.0)) <= 1e-2

    inst = TREE_INSTANCES["obstacle-active"]
    t1 = inst.spec()
    t2 = build_problem("lq1d", {"sigma0": 1.0, "f0": 0.5, "fy": 0.2, "phi2": 1.0, "h0": 0.8, "h2": 1.0},
                       horizon=0.5)
    tens = tree_ensemble(t1, inst.grid, [inst.x0])
    rep = comparison_check(tens, t1, t2, EXACT)
    assert rep["fraction"] == 0.0 and rep["max_gap"] > 0.0
    try:
        comparison_check(tens, t2, t1, EXACT)
        raise AssertionError("reversed order accepted")
    except PreconditionError:
        pass
    print("✅ PASS: gap 1 for shifted Phi, e^{L_y T}-type gap, h shift ordered, precondition enforced")


def test_penalized_push_monotone():
    """Test 9: A is non-decreasing from 0 with an active obstacle."""
    print("\n[TEST 9] push process")
    spec = build_problem("lq1d", {"sigma0": 0.8, "f0": 1.0, "phi2": 1.0, "h0": 0.2, "h2": 1.0})
    ens = simulate(spec, TimeGrid(0.0, 1.0, 20), [0.0], 0, n_paths=3000, seed=10)
    for sol in (solve_penalized(ens, spec, 50.0, POLY), solve_reflected(ens, spec, POLY)):
        assert np.all(sol.A[:, 0] == 0.0)
        assert np.all(np.diff(sol.A, axis=1) >= 0.0)
    refl = solve_reflected(ens, spec, POLY)
    assert obstacle_excess(refl, ens, spec) <= 1e-9
    assert skorokhod_residual(refl, ens, spec) >= -1e-12
    rep = apriori_report(refl, ens)
    assert all(np.isfinite(v) for v in rep.values())
    print(f"✅ PASS: A monotone; a-priori total {rep['total']:.4f}")


def test_controlled_tree():
    """Test 10: node-wise optimum equals the best adapted policy; feedback attains it."""
    print("\n[TEST 10] controlled tree")
    inst = TREE_INSTANCES["controlled"]
    spec = inst.spec()
    best = tree_value(spec, inst.grid, [inst.x0], policy="optimal")
    values = enumerate_policies(spec, inst.grid, [inst.x0])
    assert len(values) == 8
    assert abs(min(values) - best) <= 1e-12
    law = FeedbackControl(lambda t, x: (x[:, 0] < 0).astype(int))
    ens = tree_ensemble(spec, inst.grid, [inst.x0], law)
    sol = solve_reflected(ens, spec, EXACT)
    assert abs(sol.y0 - best) <= 1e-10, (sol.y0, best)
    print(f"✅ PASS: optimum {best:.12f} over 8 policies, feedback attains it")


def test_solver_guards():
    """Test 11: bisection fallback, singular design and mode checks."""
    print("\n[TEST 11] guards")
    C = np.array([1.0, -2.0, 0.5])
    y = solve_step(C, lambda y: -60.0 * y, np.full(3, 1e6), 0.02, 0.0, lipschitz_y=60.0)
    assert np.max(np.abs(y - C / 2.2)) <= 1e-10
    try:
        RegressionBasis.polynomial(2).project(np.array([[0.0], [np.nan]]), np.array([1.0, 2.0]))
        raise AssertionError("non-finite design accepted")
    except SingularDesignError:
        pass
    spec = build_problem("zero")
    ens = simulate(spec, TimeGrid(0.0, 1.0, 3), [0.0], 0, n_paths=5, seed=0)
    try:
        skorokhod_residual(solve_penalized(ens, spec, 1.0, POLY), ens, spec)
        raise AssertionError("penalized input accepted")
    except PreconditionError:
        pass
    print("✅ PASS: bisection y = C/2.2, NaN design rejected, penalized Skorokhod input rejected")


def main():
    """Run all acceptance tests."""
    print("=" * 70)
    print("RBSDE SOLVER KIT ACCEPTANCE TEST RUNNER")
    print("=" * 70)

    try:
        test_zero_problem()
        test_constant_driver()
        test_tree_oracle_equivalence()
        test_inactive_obstacle_bitwise()
        test_projection_step()
        test_tree_obstacle_values()
        test_ladder()
        test_comparison()
        test_penalized_push_monotone()
        test_controlled_tree()
        test_solver_guards()

        print("\n" + "=" * 70)
        print("✅ ALL TESTS PASSED")
        print("=" * 70)
        return 0

    except AssertionError as e:
        print("\n" + "=" * 70)
        print("❌ TEST FAILED")
        print("=" * 70)
        print(f"\nError: {e}")
        return 1

    except Exception as e:
        print("\n" + "=" * 70)
        print("❌ UNEXPECTED ERROR")
        print("=" * 70)
        print(f"\nError: {e}")
        import traceback
        traceback.print_exc()
        return 1


if __name__ == '__main__':
    sys.exit(main())
