"""Same config and seed, different worker counts: identical artifact bytes."""

from __future__ import annotations

import hashlib

from domain_kits.forward_sim import TimeGrid, simulate
from domain_kits.rbsde_solver import solve_reflected
from domain_kits.value_analysis import value_mc
from experiment_runner.artifacts import csv_text, dumps
from experiment_runner.suites.base import SuiteContext, SuiteOutcome

MAX_PATHS = 4000


def _digest(text: str) -> str:
    return "sha256:" + hashlib.sha256(text.encode("utf-8")).hexdigest()


def _pipeline(ctx: SuiteContext, workers: int) -> dict:
    spec, cfg = ctx.spec, ctx.config
    mc = ctx.mc(n_paths=min(cfg.solver.paths, MAX_PATHS), workers=workers)
    ens = simulate(spec, TimeGrid(ctx.t0, spec.horizon, cfg.grids.mc_steps), ctx.x0, 0,
                   mc.n_paths, mc.seed, workers)
    sol = solve_reflected(ens, spec, mc.basis, **mc.solver_kwargs())
    est = value_mc(spec, ctx.t0, ctx.x0, mc)
    return {
        "ensemble": _digest(csv_text(ens.to_frame())),
        "solution": _digest(csv_text(sol.to_frame())),
        "value": _digest(dumps(est.to_dict())),
    }


def run(ctx: SuiteContext) -> SuiteOutcome:
    many = max(2, ctx.threads)
    single = _pipeline(ctx, 1)
    parallel = _pipeline(ctx, many)
    identical = single == parallel
    metrics = {
        "digests_single": single,
        "digests_parallel": parallel,
        "identical": identical,
    }
    rules = [{"id": "determinism-bytes", "type": "eq", "path": "identical", "value": True}]
    return SuiteOutcome(metrics=metrics, rules=rules)
