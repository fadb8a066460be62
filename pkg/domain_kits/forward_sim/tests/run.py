"""
Forward Simulation Kit Acceptance Test Runner

Usage:
    python -m domain_kits.forward_sim.tests.run
"""

import sys
from pathlib import Path

import numpy as np

# Add parent dir to path for imports
sys.path.insert(0, str(Path(__file__).parent.parent.parent.parent))

from domain_kits.errors import PreconditionError, SimulationBlowUpError
from domain_kits.forward_sim import (
    FeedbackControl,
    TimeGrid,
    as_control_law,
    gronwall_bound,
    moment_checks,
    resimulate,
    simulate,
)
from domain_kits.problem_model import JumpWeight, LevyMeasure, build_problem, validate_assumptions


def test_zero_dynamics():
    """Test 1: no dynamics keeps every path at x0."""
    print("\n[TEST 1] zero coefficients")
    spec = build_problem("zero", {"dim": 2})
    ens = simulate(spec, TimeGrid(0.0, 1.0, 8), [0.3, -1.2], 0, n_paths=50, seed=1)
    assert np.all(ens.states == np.array([0.3, -1.2]))
    print("✅ PASS: X[p][k] = x0 for every path and step")


def test_deterministic_ode():
    """Test 2: b = 1 integrates exactly on a dyadic grid."""
    print("\n[TEST 2] deterministic ODE")
    spec = build_problem("lq1d", {"b0": 1.0})
    ens = simulate(spec, TimeGrid(0.0, 1.0, 64), [0.0], 0, n_paths=5, seed=2)
    assert np.all(ens.states[:, -1, 0] == 1.0), ens.states[:, -1, 0]
    print("✅ PASS: X_K = 1 exactly")


def test_brownian_moments():
    """Test 3: X_T = B_T has mean 0 and variance T."""
    print("\n[TEST 3] Brownian moments")
    spec = build_problem("lq1d", {"sigma0": 1.0})
    M = 20000
    ens = simulate(spec, TimeGrid(0.0, 1.0, 10), [0.0], 0, n_paths=M, seed=3)
    xt = ens.states[:, -1, 0]
    mean_se = xt.std(ddof=1) / np.sqrt(M)
    assert abs(xt.mean()) <= 4 * mean_se, (xt.mean(), mean_se)
    sq = (xt - xt.mean()) ** 2
    var_se = sq.std(ddof=1) / np.sqrt(M)
    assert abs(xt.var(ddof=1) - 1.0) <= 5 * var_se, (xt.var(ddof=1), var_se)
    inc = ens.brownian_increments[:, :, 0]
    inc_var_se = (inc ** 2).std(axis=0, ddof=1) / np.sqrt(M)
    assert np.all(np.abs(inc.var(axis=0) - 0.1) <= 5 * inc_var_se)
    print(f"✅ PASS: mean={xt.mean():.4f} var={xt.var(ddof=1):.4f}")


def test_compensated_jumps():
    """Test 4: a compensated Poisson path is a martingale."""
    print("\n[TEST 4] compensated jumps")
    levy = LevyMeasure.from_atoms([([1.0], 1.0)])
    spec = build_problem("lq1d", {"jump_c": 1.0}, levy=levy)
    x0 = 0.5
    ens = simulate(spec, TimeGrid(0.0, 1.0, 20), [x0], 0, n_paths=20000, seed=4)
    dev = ens.states[:, 1:, 0] - x0
    se = dev.std(axis=0, ddof=1) / np.sqrt(ens.n_paths)
    assert np.all(np.abs(dev.mean(axis=0)) <= 4 * se)
    counts = ens.jump_counts.sum(axis=(1, 2))
    assert abs(counts.mean() - 1.0) <= 4 * counts.std(ddof=1) / np.sqrt(ens.n_paths)
    print(f"✅ PASS: E[X_T]={ens.states[:, -1, 0].mean():.4f} vs x0={x0}")


def test_reproducibility_and_workers():
    """Test 5: same seed -> bit-identical, independent of worker count."""
    print("\n[TEST 5] reproducibility")
    levy = LevyMeasure.from_atoms([([0.5], 2.0), ([-1.0], 1.0)])
    spec = build_problem("lq1d", {"a": -0.3, "sigma0": 0.4, "jump_c": 0.2}, levy=levy)
    grid = TimeGrid(0.0, 0.5, 5)
    a = simulate(spec, grid, [1.0], 0, n_paths=9000, seed=5, workers=1)
    b = simulate(spec, grid, [1.0], 0, n_paths=9000, seed=5, workers=3)
    assert np.array_equal(a.states, b.states)
    assert np.array_equal(a.jump_counts, b.jump_counts)
    c = simulate(spec, grid, [1.0], 0, n_paths=100, seed=5)
    assert np.array_equal(a.states[:100], c.states)
    d = simulate(spec, grid, [1.0], 0, n_paths=100, seed=6)
    assert not np.array_equal(c.states, d.states)
    print("✅ PASS: serial == threaded, path prefix stable, seed matters")


def test_shared_noise_coupling():
    """Test 6: resimulating from another x0 reuses the noise record."""
    print("\n[TEST 6] shared noise")
    levy = LevyMeasure.from_atoms([([1.0], 1.0)])
    spec = build_problem("lq1d", {"sigma0": 1.0, "jump_c": 0.5}, levy=levy)
    ens = simulate(spec, TimeGrid(0.0, 1.0, 10), [1.0], 0, n_paths=200, seed=7)
    other = resimulate(spec, ens, x0=[1.1])
    assert ens.shares_noise_with(other)
    assert np.allclose(other.states - ens.states, 0.1, atol=1e-12)
    print("✅ PASS: identical dB and jump records; additive dynamics shift by 0.1")


def test_moment_checks():
    """Test 7: moment statistics and the Gronwall-type stability bound."""
    print("\n[TEST 7] moment checks")
    zero = build_problem("zero")
    ens = simulate(zero, TimeGrid(0.0, 1.0, 4), [0.0], 0, n_paths=10, seed=0)
    rep = moment_checks(ens)
    assert rep["sup_moment"] == 0.0 and rep["increment_ratio"] == 0.0
    rep = moment_checks(ens, paired=resimulate(zero, ens, x0=[1.0]))
    assert rep["stability_ratio"] == 1.0

    levy = LevyMeasure.from_atoms([([0.5], 1.0), ([-0.5], 1.0)])
    spec = build_problem("lq1d", {"a": 0.8, "sigma0": 0.5, "jump_c": 0.3}, levy=levy,
                         jump_weight=JumpWeight.truncated(1.0))
    consts = validate_assumptions(spec, probes=64, seed=0).constants
    ens = simulate(spec, TimeGrid(0.0, 1.0, 25), [1.0], 0, n_paths=2000, seed=8)
    rep = moment_checks(ens, paired=resimulate(spec, ens, x0=[1.1]))
    bound = gronwall_bound(consts, spec.horizon)
    assert np.isfinite(rep["sup_moment"]) and np.isfinite(rep["increment_ratio"])
    assert rep["stability_ratio"] <= bound, (rep["stability_ratio"], bound)
    print(f"✅ PASS: stability ratio {rep['stability_ratio']:.4f} <= bound {bound:.4f}")


def test_blow_up_reported():
    """Test 8: non-finite states are reported with path and step."""
    print("\n[TEST 8] blow-up detection")
    spec = build_problem("lq1d")
    spec = spec.with_updates(drift=lambda t, x, u: np.full_like(x, np.inf) if t > 0.25 else np.zeros_like(x))
    try:
        simulate(spec, TimeGrid(0.0, 1.0, 10), [0.0], 0, n_paths=3, seed=0)
        raise AssertionError("blow-up not detected")
    except SimulationBlowUpError as exc:
        assert exc.path == 0 and exc.step == 4, (exc.path, exc.step)
    print("✅ PASS: blow-up at path 0, step 4")


def test_feedback_and_frame():
    """Test 9: feedback control indices and the CSV layout."""
    print("\n[TEST 9] feedback control and path table")
    spec = build_problem("lq1d", {"sigma0": 1.0, "beta": 1.0}, controls=[[-1.0], [1.0]])
    law = FeedbackControl(lambda t, x: (x[:, 0] < 0).astype(int))
    ens = simulate(spec, TimeGrid(0.0, 1.0, 5), [0.2], law, n_paths=40, seed=9)
    expected = (ens.states[:, :-1, 0] < 0).astype(int)
    assert np.array_equal(ens.control_index, expected)
    frame = ens.to_frame()
    assert list(frame.columns) == ["path", "step", "time", "x_0", "control_index"]
    assert len(frame) == 40 * 6

    class IndexOnly:
        def indices(self, k, t, x):
            return np.zeros(len(x), dtype=int)

    try:
        as_control_law(IndexOnly())
        raise AssertionError("object with only indices() accepted as a control law")
    except PreconditionError:
        pass
    assert isinstance(as_control_law(lambda t, x: np.zeros(len(x), dtype=int)), FeedbackControl)
    print("✅ PASS: feedback indices follow the state; path table has the documented columns")


def main():
    """Run all acceptance tests."""
    print("=" * 70)
    print("FORWARD SIMULATION KIT ACCEPTANCE TEST RUNNER")
    print("=" * 70)

    try:
        test_zero_dynamics()
        test_deterministic_ode()
        test_brownian_moments()
        test_compensated_jumps()
        test_reproducibility_and_workers()
        test_shared_noise_coupling()
        test_moment_checks()
        test_blow_up_reported()
        test_feedback_and_frame()

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
