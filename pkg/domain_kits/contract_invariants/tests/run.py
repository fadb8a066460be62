"""
Contract Invariants Kit Acceptance Test Runner

Usage:
    python -m domain_kits.contract_invariants.tests.run

    or

    python domain_kits/contract_invariants/tests/run.py
"""

import sys
from pathlib import Path

# Add parent dir to path for imports
sys.path.insert(0, str(Path(__file__).parent.parent.parent.parent))

from domain_kits.contract_invariants import ToleranceConfig, evaluate_contract

METRICS = {
    "tree": {"max_gap": 3e-12, "instances": 5, "name": "linear"},
    "ladder": {"max_increase": 0.004, "tolerance": 0.006, "gap_ratio": 0.4},
    "determinism": {"identical": True},
    "bad": {"nan": float("nan"), "inf": float("inf")},
}


def _by_id(report):
    return {c["id"]: c for c in report["checks"]}


def test_bounds():
    """Test 1: max / min / range with literal and metric-path limits."""
    print("\n[TEST 1] bound rules")
    contract = {"rules": [
        {"id": "gap", "type": "max", "path": "tree.max_gap", "value": 1e-10},
        {"id": "ladder", "type": "max", "path": "ladder.max_increase", "value_path": "ladder.tolerance"},
        {"id": "ratio", "type": "range", "path": "ladder.gap_ratio", "min": 0.0, "max": 1.0},
        {"id": "count", "type": "min", "path": "tree.instances", "value": 5},
        {"id": "too-tight", "type": "max", "path": "tree.max_gap", "value": 1e-13},
    ]}
    rep = evaluate_contract(metrics=METRICS, contract=contract)
    checks = _by_id(rep)
    assert rep["total_checks"] == 5 and rep["failed_checks"] == 1
    assert checks["ladder"]["ok"] and checks["ladder"]["limit"] == 0.006
    assert checks["count"]["ok"] and checks["count"]["message"] == "at_least"
    assert not checks["too-tight"]["ok"] and checks["too-tight"]["message"] == "not_at_most"
    assert rep["pass_rate"] == 0.8
    print("✅ PASS: literal and metric-path limits, one failing rule reported")


def test_missing_and_non_finite():
    """Test 2: missing paths, NaN and inf values never pass."""
    print("\n[TEST 2] missing and non-finite values")
    contract = {"rules": [
        {"id": "absent", "type": "max", "path": "tree.nothing", "value": 1.0},
        {"id": "nan", "type": "max", "path": "bad.nan", "value": 1.0},
        {"id": "inf", "type": "min", "path": "bad.inf", "value": 0.0},
        {"id": "bad-limit", "type": "max", "path": "tree.max_gap", "value_path": "tree.nothing"},
        {"id": "string", "type": "max", "path": "tree.name", "value": 1.0},
        {"id": "no-limit", "type": "max", "path": "tree.max_gap"},
    ]}
    checks = _by_id(evaluate_contract(metrics=METRICS, contract=contract))
    assert checks["absent"]["message"] == "missing"
    assert checks["nan"]["message"] == "not_finite"
    assert checks["inf"]["message"] == "not_finite"
    assert checks["bad-limit"]["message"] == "limit_missing"
    assert checks["string"]["message"] == "not_numeric"
    assert checks["no-limit"]["message"] == "limit_missing"
    assert not any(c["ok"] for c in checks.values())
    print("✅ PASS: every malformed check fails with a stable message")


def test_equality_types_and_approx():
    """Test 3: eq, type_is, exists and approx against literal, metric and baseline targets."""
    print("\n[TEST 3] eq / type_is / exists / approx")
    contract = {"rules": [
        {"id": "same", "type": "eq", "path": "determinism.identical", "value": True},
        {"id": "kind", "type": "type_is", "path": "tree.instances", "expected": "number"},
        {"id": "flag", "type": "type_is", "path": "determinism.identical", "expected": "boolean"},
        {"id": "here", "type": "exists", "path": "ladder"},
        {"id": "close", "type": "approx", "path": "ladder.max_increase", "value": 0.0041, "abs_tol": 2e-4},
        {"id": "vs-metric", "type": "approx", "path": "ladder.max_increase", "value_path": "ladder.tolerance",
         "rel_tol": 0.5},
        {"id": "vs-baseline", "type": "approx", "path": "ladder.gap_ratio", "baseline_path": "ratio",
         "abs_tol": 1e-12},
        {"id": "mystery", "type": "regex", "path": "tree.name"},
    ]}
    checks = _by_id(evaluate_contract(metrics=METRICS, contract=contract, baseline={"ratio": 0.4}))
    for key in ("same", "kind", "flag", "here", "close", "vs-metric", "vs-baseline"):
        assert checks[key]["ok"], checks[key]
    assert checks["mystery"]["message"] == "unknown_rule_type:regex"
    print("✅ PASS: comparators resolve; unsupported rule types fail")


def test_tolerance_presets():
    """Test 4: presets and their combined bound."""
    print("\n[TEST 4] tolerance presets")
    assert ToleranceConfig.for_tree_oracle().bound(1.0) == 1e-10
    mc = ToleranceConfig.for_monte_carlo()
    assert abs(mc.bound(0.01) - (0.03 + 1e-12)) <= 1e-15
    assert ToleranceConfig.for_scheme().to_dict() == {"abs_tol": 1e-9, "n_stderr": 0.0, "rel_tol": 0.0}
    assert ToleranceConfig.for_stability().rel_tol == 0.2
    assert ToleranceConfig().bound(5.0) == 0.0
    print("✅ PASS: tree 1e-10, Monte Carlo 3 stderr, scheme 1e-9, stability 20 %")


def main():
    """Run all contract invariants tests."""
    print("=" * 70)
    print("CONTRACT INVARIANTS KIT ACCEPTANCE TEST RUNNER")
    print("=" * 70)

    try:
        test_bounds()
        test_missing_and_non_finite()
        test_equality_types_and_approx()
        test_tolerance_presets()

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
