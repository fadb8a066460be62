"""
Experiment Runner Acceptance Test Runner

Usage:
    python -m experiment_runner.tests.run

    or

    python experiment_runner/tests/run.py
"""

import json
import sys
import tempfile
from pathlib import Path

import numpy as np
import pandas as pd

# Add parent dir to path for imports
sys.path.insert(0, str(Path(__file__).parent.parent.parent))

from domain_kits.errors import ConfigError, GridMismatchError, PreconditionError
from domain_kits.forward_sim import TimeGrid
from domain_kits.hjb_pide import SpaceGrid, ValueSurface
from experiment_runner.artifacts import ArtifactWriter
from experiment_runner.cli import compare_surfaces, main, run_suites
from experiment_runner.manifest import MANIFEST_NAME, check_manifest, verify_signature
from experiment_runner.schemas import config_hash, load_config, parse_config
from experiment_runner.settings import AppSettings
from experiment_runner.suites import SUITES, SuiteContext, SuiteDef, SuiteOutcome, run_suite

CONFIGS = Path(__file__).parent.parent.parent / "templates" / "configs"
MINIMAL = {"problem": {"family": "zero"}, "solver": {"seed": 1}}


def _config_error(raw):
    try:
        parse_config(raw)
    except ConfigError as e:
        return e
    raise AssertionError(f"config accepted: {raw}")


def _read_json(path):
    return json.loads(Path(path).read_text(encoding="utf-8"))


def test_config_parsing():
    """Test 1: bundled configs load; bad configs raise ConfigError with located errors."""
    print("\n[TEST 1] config parsing")
    for path in sorted(CONFIGS.glob("*.yaml")):
        load_config(path)
    std = load_config(CONFIGS / "standard_1d.yaml")
    assert std.problem.family == "lq1d" and len(std.levy.atoms) == 2
    assert std.solver.ladder == [1.0, 2.0, 4.0, 8.0, 16.0, 32.0, 64.0, 128.0, 256.0]

    err = _config_error({**MINIMAL, "surprise": 1})
    assert err.code == "config_error"
    assert any(e["loc"] == "surprise" for e in err.details["errors"]), err.details
    _config_error({"problem": {"family": "zero"}, "solver": {}})
    _config_error({"problem": {"family": "nope"}, "solver": {"seed": 1}})
    _config_error({"problem": {"family": "lq1d", "params": {"a": float("nan")}}, "solver": {"seed": 1}})
    _config_error({**MINIMAL, "suites": ["no-such-suite"]})
    _config_error({**MINIMAL, "solver": {"seed": 1, "ladder": [4, 2]}})
    _config_error({**MINIMAL, "grids": {"t0": 1.0}})
    _config_error([1, 2])

    try:
        load_config(CONFIGS / "missing.yaml")
        raise AssertionError("missing file accepted")
    except ConfigError:
        pass

    cfg = parse_config(MINIMAL)
    assert config_hash(cfg) == config_hash(parse_config(dict(MINIMAL)))
    assert config_hash(cfg.with_seed(2)) != config_hash(cfg)
    assert cfg.with_suites(["tree-oracle"]).suites == ["tree-oracle"]
    print(f"✅ PASS: {len(list(CONFIGS.glob('*.yaml')))} bundled configs load; 8 bad configs rejected")


def test_run_trivial_zero():
    """Test 2: trivial-zero exits 0 with all-zero surfaces and a complete manifest."""
    print("\n[TEST 2] run trivial-zero")
    with tempfile.TemporaryDirectory() as tmp:
        code = main(["run", "--config", str(CONFIGS / "trivial_zero.yaml"), "--out", tmp])
        assert code == 0, _read_json(Path(tmp) / "summary.json")
        summary = _read_json(Path(tmp) / "summary.json")
        assert summary["status"] == "passed" and summary["suites"][0]["suite"] == "trivial-zero"
        surface = pd.read_csv(Path(tmp) / "trivial-zero" / "obstacle_surface.csv")
        assert np.all(surface["W"].to_numpy() == 0.0)
        manifest = _read_json(Path(tmp) / MANIFEST_NAME)
        assert check_manifest(tmp, manifest)["complete"], check_manifest(tmp, manifest)
        assert manifest["seed"] == 1 and manifest["config_hash"].startswith("sha256:")
        assert not (Path(tmp) / "error_report.json").exists()
    print("✅ PASS: exit 0, zero surface, manifest lists every file")


def test_run_tree_oracle():
    """Test 3: tree-oracle exits 0 and the table gap is below 1e-10."""
    print("\n[TEST 3] run tree-oracle")
    with tempfile.TemporaryDirectory() as tmp:
        code = main(["run", "--config", str(CONFIGS / "tree_oracle.yaml"), "--out", tmp,
                     "--suite", "tree-oracle"])
        assert code == 0, _read_json(Path(tmp) / "tree-oracle" / "report.json")
        table = pd.read_csv(Path(tmp) / "tree-oracle" / "tree_oracle.csv")
        assert len(table) == 5 and table["gap"].max() < 1e-10, table
        controlled = table.set_index("instance").loc["controlled"]
        assert controlled["optimal_value"] < controlled["oracle_constant"], controlled
        assert abs(controlled["value_mc"] - controlled["optimal_value"]) <= 1e-10, controlled
        assert controlled["best_candidate"] == "feedback-policy"
        report = _read_json(Path(tmp) / "tree-oracle" / "report.json")
        assert any(c["id"] == "tree-optimal" and c["ok"] for c in report["contract"]["checks"]), report
        summary = _read_json(Path(tmp) / "summary.json")
        assert [s["suite"] for s in summary["suites"]] == ["tree-oracle"]
    print(f"✅ PASS: max gap {table['gap'].max():.2e}; controlled value reaches the enumerated optimum")


def test_exit_codes():
    """Test 4: validation gate and config errors exit 2; failed checks exit 1."""
    print("\n[TEST 4] exit codes and error reports")
    with tempfile.TemporaryDirectory() as tmp:
        code = main(["run", "--config", str(CONFIGS / "bad_obstacle.yaml"), "--out", tmp])
        assert code == 2
        report = _read_json(Path(tmp) / "error_report.json")
        assert report["errors"][0]["code"] == "assumption_failed", report
        assert report["errors"][0]["exit_code"] == 2

    with tempfile.TemporaryDirectory() as tmp:
        bad = Path(tmp) / "bad.yaml"
        bad.write_text("problem: {family: zero}\nsolver: {seed: 1}\nextra: true\n", encoding="utf-8")
        assert main(["validate", "--config", str(bad), "--out", tmp]) == 2
        assert _read_json(Path(tmp) / "error_report.json")["errors"][0]["code"] == "config_error"
        assert main(["validate", "--config", str(CONFIGS / "trivial_zero.yaml"), "--out", tmp]) == 0

    def failing(ctx):
        return SuiteOutcome(metrics={"gap": 1.0}, rules=[{"id": "gap", "type": "max", "path": "gap", "value": 0.0}])

    def raising(ctx):
        raise PreconditionError("bad call", {"where": "test"})

    with tempfile.TemporaryDirectory() as tmp:
        ctx = SuiteContext(parse_config(MINIMAL), ArtifactWriter(tmp))
        rep = run_suite(SuiteDef("failing", "1.0.0", "test", "always fails", failing), ctx)
        assert rep["status"] == "failed" and rep["contract"]["failed_checks"] == 1
        rep = run_suite(SuiteDef("raising", "1.0.0", "test", "always raises", raising), ctx)
        assert rep["status"] == "error" and rep["error"]["code"] == "precondition_failed"
        assert rep["error"]["exit_code"] == 2
        assert (Path(tmp) / "raising" / "report.json").exists()
    print("✅ PASS: gate -> 2, config -> 2, failed contract -> failed, raised error -> error")


def test_manifest_determinism():
    """Test 5: identical config and seed give identical bytes across worker counts; signing verifies."""
    print("\n[TEST 5] manifest determinism")
    cfg = load_config(CONFIGS / "trivial_zero.yaml")
    settings = AppSettings()
    settings.signing_key = None
    with tempfile.TemporaryDirectory() as a, tempfile.TemporaryDirectory() as b:
        assert run_suites(cfg, ["trivial-zero", "determinism"], a, threads=1, settings=settings) == 0
        assert run_suites(cfg, ["trivial-zero", "determinism"], b, threads=3, settings=settings) == 0
        ma = (Path(a) / MANIFEST_NAME).read_bytes()
        mb = (Path(b) / MANIFEST_NAME).read_bytes()
        assert ma == mb
        for entry in json.loads(ma)["artifacts"]:
            assert (Path(a) / entry["path"]).read_bytes() == (Path(b) / entry["path"]).read_bytes(), entry

    settings.signing_key = b"test-key"
    with tempfile.TemporaryDirectory() as c:
        run_suites(cfg, ["trivial-zero"], c, settings=settings)
        manifest = _read_json(Path(c) / MANIFEST_NAME)
        assert verify_signature(manifest, b"test-key")
        assert not verify_signature(manifest, b"other-key")
        assert not verify_signature({**manifest, "seed": 99}, b"test-key")
    print("✅ PASS: byte-identical artifacts for 1 and 3 workers; HMAC signature verifies")


def test_compare_surfaces():
    """Test 6: identical dumps differ by 0, a +1 shift by 1, other grids are refused."""
    print("\n[TEST 6] compare_surfaces")
    times, space = TimeGrid(0.0, 1.0, 10), SpaceGrid.uniform(-2.0, 2.0, 21)
    base = ValueSurface.from_function(times, space, lambda t, X: X[:, 0] ** 2 + (1.0 - t))
    shifted = ValueSurface.from_function(times, space, lambda t, X: X[:, 0] ** 2 + (1.0 - t) + 1.0)
    other = ValueSurface.from_function(times, SpaceGrid.uniform(-2.0, 2.0, 11), lambda t, X: X[:, 0] ** 2)
    with tempfile.TemporaryDirectory() as tmp:
        writer = ArtifactWriter(tmp)
        for name, surf in (("a", base), ("a_copy", base), ("b", shifted), ("c", other)):
            writer.write_csv(f"{name}.csv", surf.to_frame())
        same = compare_surfaces(Path(tmp) / "a.csv", Path(tmp) / "a_copy.csv")
        assert same["max_abs_diff"] == 0.0 and same["mean_abs_diff"] == 0.0
        shift = compare_surfaces(Path(tmp) / "a.csv", Path(tmp) / "b.csv")
        assert abs(shift["max_abs_diff"] - 1.0) <= 1e-12 and abs(shift["mean_abs_diff"] - 1.0) <= 1e-12
        try:
            compare_surfaces(Path(tmp) / "a.csv", Path(tmp) / "c.csv")
            raise AssertionError("different grids accepted")
        except GridMismatchError:
            pass
        assert main(["compare", "--a", str(Path(tmp) / "a.csv"), "--b", str(Path(tmp) / "c.csv")]) == 2
    print(f"✅ PASS: identical -> 0, shifted -> {shift['max_abs_diff']:.1f}, mismatch -> exit 2")


def test_suite_registry():
    """Test 7: every registered suite is addressable and self-consistent."""
    print("\n[TEST 7] suite registry")
    assert len(SUITES) == 13
    for suite_id, suite in SUITES.items():
        assert suite.suite_id == suite_id and callable(suite.run) and suite.description
    print(f"✅ PASS: {len(SUITES)} suites registered")


def main_tests():
    """Run all experiment runner tests."""
    print("=" * 70)
    print("EXPERIMENT RUNNER ACCEPTANCE TEST RUNNER")
    print("=" * 70)

    try:
        test_config_parsing()
        test_run_trivial_zero()
        test_run_tree_oracle()
        test_exit_codes()
        test_manifest_determinism()
        test_compare_surfaces()
        test_suite_registry()

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
    sys.exit(main_tests())
