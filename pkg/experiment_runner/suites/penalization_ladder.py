"""Penalized BSDEs on shared noise: Y^n decreases in n towards the reflected solution."""

from __future__ import annotations

import numpy as np
import pandas as pd

from domain_kits.contract_invariants import ToleranceConfig
from domain_kits.forward_sim import TimeGrid, simulate
from domain_kits.rbsde_solver import penalization_ladder, skorokhod_residual
from domain_kits.value_analysis import value_mc
from experiment_runner.suites.base import SuiteContext, SuiteOutcome

REFERENCE_LEVEL = 16.0
# paths per candidate for the value ladder (reported only)
VALUE_LADDER_PATHS = 5000


def reference_index(levels) -> int:
    """Level compared against the top of the ladder: 16 when present, else the one below the top."""
    if REFERENCE_LEVEL in levels[:-1]:
        return levels.index(REFERENCE_LEVEL)
    return max(len(levels) - 2, 0)


def run(ctx: SuiteContext) -> SuiteOutcome:
    spec, cfg = ctx.spec, ctx.config
    mc = ctx.mc()
    levels = list(cfg.solver.ladder)
    grid = TimeGrid(ctx.t0, spec.horizon, cfg.grids.mc_steps)
    ens = simulate(spec, grid, ctx.x0, 0, cfg.solver.paths, ctx.seed, mc.workers)
    ladder = penalization_ladder(ens, spec, levels, mc.basis, **mc.solver_kwargs())

    tol = ToleranceConfig.for_monte_carlo()
    worst = -np.inf
    for lo, hi in zip(ladder.solutions, ladder.solutions[1:]):
        band = tol.n_stderr * np.sqrt(lo.step_stderr ** 2 + hi.step_stderr ** 2) + tol.abs_tol
        worst = max(worst, float(np.max(hi.Y - lo.Y - band[None, :])))

    gaps = ladder.table["sup_gap_to_reflected"].tolist()
    ref = reference_index(levels)

    values = []
    value_cfg = ctx.mc(n_paths=min(cfg.solver.paths, VALUE_LADDER_PATHS))
    for n in levels:
        est = value_mc(spec, ctx.t0, ctx.x0, value_cfg, mode="penalized", n=n)
        values.append({"n": n, "value": est.value, "stderr": est.stderr, "best": est.best.get("index", -1)})
    est = value_mc(spec, ctx.t0, ctx.x0, value_cfg)
    values.append({"n": np.inf, "value": est.value, "stderr": est.stderr, "best": est.best.get("index", -1)})

    metrics = {
        "levels": levels,
        "y0": [s.y0 for s in ladder.solutions],
        "y0_reflected": ladder.reflected.y0,
        "max_increase": ladder.max_increase,
        "max_increase_over_band": worst if len(levels) > 1 else 0.0,
        "rate_constant": ladder.rate_constant,
        "reference_level": levels[ref],
        "gap_reference": gaps[ref],
        "gap_top": gaps[-1],
        "gap_decrease": gaps[ref] - gaps[-1],
        "skorokhod_residual": abs(skorokhod_residual(ladder.reflected, ens, spec)),
        "paths": cfg.solver.paths,
        "steps": cfg.grids.mc_steps,
    }
    rules = [
        {"id": "ladder-monotone", "type": "max", "path": "max_increase_over_band", "value": 0.0},
        {"id": "ladder-skorokhod", "type": "max", "path": "skorokhod_residual", "value": 1e-9},
    ]
    if len(levels) > 1:
        rules.append({"id": "ladder-gap-shrinks", "type": "min", "path": "gap_decrease", "value": 1e-15})
    return SuiteOutcome(
        metrics=metrics,
        rules=rules,
        tables={"ladder": ladder.table, "value_ladder": pd.DataFrame(values)},
    )
