"""
Batch command line.

    python main.py validate --config templates/configs/standard_1d.yaml
    python main.py run --config templates/configs/standard_1d.yaml --out out/ --threads 4
    python main.py ladder | cross-check | regularity | verify --config ...
    python main.py compare --a out/x/obstacle_surface.csv --b out/y/obstacle_surface.csv

Exit codes: 0 all checks passed, 1 a check failed or a numerical error,
2 config / validation / precondition errors. Failures leave a
machine-readable error_report.json in the output directory.
"""

from __future__ import annotations

import argparse
import logging
import sys
import time
from pathlib import Path
from typing import Any, Dict, List, Optional, Sequence

import numpy as np
import pandas as pd

from domain_kits.errors import ErrorTaxonomy, RSCLabError
from domain_kits.hjb_pide import ValueSurface
from experiment_runner import problems
from experiment_runner.artifacts import ArtifactWriter, dumps
from experiment_runner.manifest import build_manifest, sign_manifest, write_manifest
from experiment_runner.run_logging import RunLogger, configure_logging, new_run_id, run_id_ctx
from experiment_runner.schemas import ExperimentConfig, config_hash, load_config
from experiment_runner.settings import AppSettings, get_settings
from experiment_runner.suites import SUITES, SuiteContext, run_suite

logger = logging.getLogger(__name__)

ERROR_REPORT = "error_report.json"
SUMMARY = "summary.json"
VALIDATION = "validation.json"

VERB_SUITES = {
    "ladder": ["penalization-ladder", "pde-ladder"],
    "cross-check": ["cross-check"],
    "regularity": ["regularity"],
    "verify": ["feedback"],
}


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="rsclab", description="Reflected stochastic recursive control lab.")
    sub = parser.add_subparsers(dest="verb", required=True)

    def with_config(p: argparse.ArgumentParser) -> argparse.ArgumentParser:
        p.add_argument("--config", required=True, help="Experiment YAML")
        p.add_argument("--out", default=None, help="Output directory (default: config, then RSCLAB_OUTPUT_DIR)")
        p.add_argument("--seed-override", type=int, default=None, help="Replace solver.seed")
        p.add_argument("--threads", type=int, default=None, help="Noise workers (default RSCLAB_THREADS)")
        return p

    with_config(sub.add_parser("validate", help="Validate the config and the problem's assumptions"))
    run = with_config(sub.add_parser("run", help="Run suites (config list, --suite, or all)"))
    run.add_argument("--suite", action="append", default=None, help="Suite id; repeatable")
    for verb, suites in VERB_SUITES.items():
        with_config(sub.add_parser(verb, help=f"Run {', '.join(suites)}"))

    cmp_ = sub.add_parser("compare", help="Node-wise difference of two surface CSV dumps")
    cmp_.add_argument("--a", required=True)
    cmp_.add_argument("--b", required=True)
    cmp_.add_argument("--out", default=None, help="Also write comparison.json here")
    return parser


def compare_surfaces(path_a, path_b) -> Dict[str, Any]:
    """Max and mean absolute node-wise difference of two surfaces on the same grid."""
    a = ValueSurface.from_frame(pd.read_csv(path_a))
    b = ValueSurface.from_frame(pd.read_csv(path_b))
    a.require_same_grid(b)
    diff = np.abs(a.values - b.values)
    return {
        "a": str(path_a),
        "b": str(path_b),
        "nodes": int(diff.size),
        "max_abs_diff": float(np.max(diff)),
        "mean_abs_diff": float(np.mean(diff)),
    }


def error_entry(error: Dict[str, Any], suite: Optional[str] = None) -> Dict[str, Any]:
    info = ErrorTaxonomy.classify(error["code"])
    return {"suite": suite, **error, "severity": info["severity"], "impact": info["impact"],
            "exit_code": info["exit_code"]}


def write_error_report(out_dir, entries: List[Dict[str, Any]]) -> Path:
    path = Path(out_dir) / ERROR_REPORT
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_bytes(dumps({"errors": entries}).encode("utf-8"))
    return path


def _load(args) -> ExperimentConfig:
    config = load_config(args.config)
    if args.seed_override is not None:
        config = config.with_seed(args.seed_override)
    return config


def _out_dir(args, settings: AppSettings, config: Optional[ExperimentConfig] = None) -> Path:
    if getattr(args, "out", None):
        return Path(args.out)
    if config is not None and config.outputs.dir:
        return Path(config.outputs.dir)
    return Path(settings.output_dir)


def run_suites(config: ExperimentConfig, suite_ids: Sequence[str], out_dir, threads: int = 1,
               settings: Optional[AppSettings] = None) -> int:
    """Validate, run the suites in order, write summary and manifest; return the exit code."""
    settings = settings or get_settings()
    key = settings.signing_key
    run_logger = RunLogger(secrets=[key.decode("utf-8")] if key else [])
    chash = config_hash(config)
    writer = ArtifactWriter(out_dir, config.outputs.formats)
    ctx = SuiteContext(config, writer, threads=threads, run_logger=run_logger)

    start = time.perf_counter()
    writer.write_json(VALIDATION, ctx.validation.to_dict(), always=True)
    reports = [run_suite(SUITES[s], ctx) for s in suite_ids]

    errors = []
    for rep in reports:
        if rep["error"] is not None:
            errors.append(error_entry(rep["error"], rep["suite"]))
        elif rep["status"] != "passed":
            bad = [c for c in rep["contract"]["checks"] if not c["ok"]]
            errors.append(error_entry({"code": "acceptance_failed", "message": "contract checks failed",
                                       "details": {"checks": bad}}, rep["suite"]))
    if any(e["exit_code"] == 2 for e in errors):
        code = 2
    elif errors:
        code = 1
    else:
        code = 0

    summary = {
        "name": config.name,
        "config_hash": chash,
        "seed": config.solver.seed,
        "status": "passed" if code == 0 else "failed",
        "exit_code": code,
        "suites": [{"suite": r["suite"], "version": r["version"], "status": r["status"],
                    "failed_checks": r["contract"]["failed_checks"],
                    "error_code": None if r["error"] is None else r["error"]["code"]} for r in reports],
    }
    writer.write_json(SUMMARY, summary, always=True)
    files = list(writer.files)
    if errors:
        write_error_report(out_dir, errors)
        files.append(ERROR_REPORT)
    manifest = build_manifest(out_dir, files, chash, config.solver.seed)
    write_manifest(out_dir, sign_manifest(manifest, key))
    run_logger.event("run_finished", status=summary["status"], config_hash=chash,
                     latency_ms=(time.perf_counter() - start) * 1000.0, suites=list(suite_ids))
    return code


def _suite_ids(args, config: ExperimentConfig) -> List[str]:
    if args.verb in VERB_SUITES:
        return list(VERB_SUITES[args.verb])
    if args.suite:
        return list(config.with_suites(args.suite).suites)
    return list(config.suites) or list(SUITES)


def _validate(args) -> int:
    config = _load(args)
    _, report = problems.validated_spec(config)
    print(dumps({"config_hash": config_hash(config), "validation": report.to_dict()}), end="")
    return 0


def _compare(args) -> int:
    report = compare_surfaces(args.a, args.b)
    if args.out:
        path = Path(args.out) / "comparison.json"
        path.parent.mkdir(parents=True, exist_ok=True)
        path.write_bytes(dumps(report).encode("utf-8"))
    print(dumps(report), end="")
    return 0


def main(argv: Optional[Sequence[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    settings = get_settings()
    configure_logging(settings.log_level)
    run_id_ctx.set(new_run_id())

    config = None
    try:
        if args.verb == "compare":
            return _compare(args)
        if args.verb == "validate":
            return _validate(args)
        config = _load(args)
        threads = args.threads if args.threads is not None else settings.threads
        suites = _suite_ids(args, config)
        return run_suites(config, suites, _out_dir(args, settings, config), max(1, int(threads)), settings)
    except RSCLabError as exc:
        entry = error_entry(exc.to_dict())
        logger.error("%s: %s", exc.code, exc.message)
        if args.verb != "compare":
            write_error_report(_out_dir(args, settings, config), [entry])
        print(dumps({"errors": [entry]}), end="", file=sys.stderr)
        return entry["exit_code"]
