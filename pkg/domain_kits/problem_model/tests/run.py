"""
Problem Model Kit Acceptance Test Runner

Usage:
    python -m domain_kits.problem_model.tests.run

    or

    python domain_kits/problem_model/tests/run.py
"""

import sys
from pathlib import Path

import numpy as np
from hypothesis import given, settings, strategies as st

# Add parent dir to path for imports
sys.path.insert(0, str(Path(__file__).parent.parent.parent.parent))

from domain_kits.errors import AssumptionError, ConfigError, IllPosedSpecError
from domain_kits.problem_model import (
    JumpWeight,
    LevyMeasure,
    aggregate_v,
    build_problem,
    levy_integral,
    validate_assumptions,
)


def test_levy_integral():
    """Test 1: atomic integrals are exact weighted sums."""
    print("\n[TEST 1] levy_integral")
    levy = LevyMeasure.from_atoms([([1.0], 0.5), ([-1.0], 0.5)])
    assert levy.total_mass == 1.0
    assert levy_integral(levy, lambda e: 1.0) == levy.total_mass
    assert levy_integral(levy, lambda e: 0.0) == 0.0
    assert levy_integral(levy, lambda e: float(e[0]) ** 2) == 1.0
    assert levy_integral(LevyMeasure.empty(), lambda e: 1.0) == 0.0
    try:
        levy_integral(levy, lambda e: float("nan"))
        raise AssertionError("non-finite integrand accepted")
    except IllPosedSpecError:
        pass
    print("✅ PASS: g=1 -> mass, g=0 -> 0, e^2 over +-1 -> 1.0, NaN rejected")


def test_levy_invariants():
    """Test 2: zero marks and non-positive weights are rejected."""
    print("\n[TEST 2] LevyMeasure invariants")
    for atoms in ([([0.0], 1.0)], [([1.0], 0.0)], [([1.0], -1.0)]):
        try:
            LevyMeasure.from_atoms(atoms)
            raise AssertionError(f"accepted invalid atoms {atoms}")
        except IllPosedSpecError:
            pass
    levy = LevyMeasure.from_atoms([([1.0], 0.25), ([2.0], 0.75)])
    assert levy.total_mass == float(np.sum(levy.weights))
    print("✅ PASS: zero mark and non-positive weights rejected; mass is the weight sum")


def test_aggregate_v():
    """Test 3: driver jump aggregate."""
    print("\n[TEST 3] aggregate_v")
    levy = LevyMeasure.from_atoms([([1.0], 2.0)])
    lw = JumpWeight.truncated(kappa=1.0)
    assert aggregate_v(levy, lw, lambda e: 0.0) == 0.0
    assert aggregate_v(levy, lw, lambda e: 3.0) == 6.0

    levy2 = LevyMeasure.from_atoms([([0.3], 1.5), ([-2.0], 0.5), ([0.7], 1.0)])
    assert abs(aggregate_v(levy2, lw, lambda e: 1.0) - levy_integral(levy2, lw.eval)) <= 1e-15

    @settings(max_examples=60, deadline=None)
    @given(
        a=st.floats(-10, 10), b=st.floats(-10, 10),
        c1=st.floats(-5, 5), c2=st.floats(-5, 5),
    )
    def linear(a, b, c1, c2):
        V1 = lambda e: c1 * float(e[0])
        V2 = lambda e: c2 + float(e[0]) ** 2
        lhs = aggregate_v(levy2, lw, lambda e: a * V1(e) + b * V2(e))
        rhs = a * aggregate_v(levy2, lw, V1) + b * aggregate_v(levy2, lw, V2)
        assert abs(lhs - rhs) <= 1e-12 * max(1.0, abs(lhs), abs(rhs))

    linear()
    print("✅ PASS: V=0 -> 0, single atom -> 6.0, factorization, linearity in V")


def test_jump_weight_bound():
    """Test 4: jump weight must stay below kappa*min(1,|e|)."""
    print("\n[TEST 4] JumpWeight bound")
    levy = LevyMeasure.from_atoms([([0.5], 1.0), ([3.0], 1.0)])
    JumpWeight.truncated(kappa=1.0, scale=1.0).check(levy)
    try:
        JumpWeight.truncated(kappa=1.0, scale=2.0).check(levy)
        raise AssertionError("weight above the bound accepted")
    except IllPosedSpecError:
        pass
    try:
        build_problem("lq1d", {}, levy=levy, jump_weight=JumpWeight(kappa=1.0, eval=lambda e: -0.1))
        raise AssertionError("negative weight accepted by ProblemSpec")
    except IllPosedSpecError:
        pass
    print("✅ PASS: bound enforced on every atom at construction")


def test_zero_spec_validates():
    """Test 5: zero coefficients pass every check with zero constants."""
    print("\n[TEST 5] validate_assumptions on the zero family")
    spec = build_problem("zero", {"f_const": 0.0, "phi_const": 0.0, "h_const": 1.0})
    report = validate_assumptions(spec, probes=64, seed=3)
    assert report.passed, report.to_dict()
    for key in ("L_b", "L_sigma", "L_gamma", "L_y", "L_z", "L_v"):
        assert report.constants[key] == 0.0, (key, report.constants[key])
    report.raise_for_gate()
    print(f"✅ PASS: {len(report.checks)} checks pass, Lipschitz constants 0")


def test_obstacle_incompatible():
    """Test 6: Phi > h(T,.) fails the obstacle gate."""
    print("\n[TEST 6] obstacle compatibility")
    spec = build_problem("zero", {"phi_const": 1.0, "h_const": 0.0})
    report = validate_assumptions(spec, probes=16, seed=0)
    check = report.get("obstacle_compatibility")
    assert not check.ok and check.estimate == 1.0
    raised = None
    try:
        report.raise_for_gate()
    except AssumptionError as exc:
        raised = exc
    assert raised is not None, "gate did not raise"
    assert raised.details["check"] == "obstacle_compatibility"
    print(f"✅ PASS: obstacle check fails with excess {check.estimate}")


def test_lq1d_gamma_ratio():
    """Test 7: gamma ratio equals c / min_a(l(e)/|e|) with l(e) = min(1,|e|)."""
    print("\n[TEST 7] lq1d jump Lipschitz ratio")
    marks = [2.0, 0.5, -4.0]
    levy = LevyMeasure.from_atoms([([m], 1.0) for m in marks])
    c = 0.5
    spec = build_problem("lq1d", {"jump_x": c}, levy=levy, jump_weight=JumpWeight.truncated(1.0))
    report = validate_assumptions(spec, probes=128, seed=11)
    brute = max(abs(c * m) / min(1.0, abs(m)) for m in marks)
    expected = c / min(min(1.0, abs(m)) / abs(m) for m in marks)
    assert abs(brute - expected) <= 1e-12
    est = report.constants["L_gamma"]
    assert abs(est - expected) <= 1e-12, (est, expected)
    print(f"✅ PASS: gamma ratio {est} matches exhaustive {expected}")


def test_driver_monotone_in_v():
    """Test 8: a driver decreasing in v fails the monotonicity gate."""
    print("\n[TEST 8] monotonicity of f in v")
    ok = validate_assumptions(build_problem("lq1d", {"fv": 0.5}), probes=32, seed=1)
    bad = validate_assumptions(build_problem("lq1d", {"fv": -0.5}), probes=32, seed=1)
    assert ok.get("driver_monotone_in_v").ok
    assert not bad.get("driver_monotone_in_v").ok
    assert abs(bad.constants["L_v"] - 0.5) <= 1e-12
    print("✅ PASS: fv=0.5 passes, fv=-0.5 fails")


def test_validation_deterministic():
    """Test 9: same seed, same report."""
    print("\n[TEST 9] determinism")
    levy = LevyMeasure.from_atoms([([0.4], 1.0), ([-0.8], 0.5)])
    spec = build_problem("trig", {"dim": 2}, levy=levy, jump_weight=JumpWeight.truncated(1.0, 0.5),
                         controls=[[-1.0], [0.0], [1.0]])
    r1 = validate_assumptions(spec, probes=48, seed=7).to_dict()
    r2 = validate_assumptions(spec, probes=48, seed=7).to_dict()
    assert r1 == r2
    print("✅ PASS: identical reports under a fixed seed")


def test_ill_posed_and_config_errors():
    """Test 10: non-finite coefficients and bad configs are rejected."""
    print("\n[TEST 10] ill-posed specs and config errors")
    spec = build_problem("lq1d", {"phi2": 1.0})
    broken = spec.with_updates(terminal=lambda x: np.full(x.shape[0], np.nan))
    try:
        validate_assumptions(broken, probes=8, seed=0)
        raise AssertionError("NaN terminal accepted")
    except IllPosedSpecError as exc:
        assert exc.details["coefficient"] == "terminal"

    for family, params in (("nope", {}), ("lq1d", {"unknown": 1.0}), ("lq1d", {"a": float("inf")})):
        try:
            build_problem(family, params)
            raise AssertionError(f"accepted {family} {params}")
        except ConfigError:
            pass
    print("✅ PASS: NaN coefficient, unknown family/key and inf parameter rejected")


def main():
    """Run all acceptance tests."""
    print("=" * 70)
    print("PROBLEM MODEL KIT ACCEPTANCE TEST RUNNER")
    print("=" * 70)

    try:
        test_levy_integral()
        test_levy_invariants()
        test_aggregate_v()
        test_jump_weight_bound()
        test_zero_spec_validates()
        test_obstacle_incompatible()
        test_lq1d_gamma_ratio()
        test_driver_monotone_in_v()
        test_validation_deterministic()
        test_ill_posed_and_config_errors()

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
