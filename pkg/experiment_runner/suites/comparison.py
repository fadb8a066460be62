"""Ordered data give ordered reflected solutions on shared noise."""

from __future__ import annotations

import pandas as pd

from domain_kits.forward_sim import TimeGrid, simulate
from domain_kits.problem_model import LevyMeasure, build_problem
from domain_kits.rbsde_solver import comparison_check
from experiment_runner import problems
from experiment_runner.suites.base import SuiteContext, SuiteOutcome

BASE = {"sigma0": 0.4, "a": -0.2, "jump_c": 0.3, "phi2": 1.0, "h0": 0.8, "h2": 1.0, "f0": 0.1}
# (label, parameter, lower problem value, upper problem value)
PAIRS = (
    ("driver", "f0", 0.1, 0.6),
    ("terminal", "phi0", 0.0, 0.3),
    ("obstacle", "h0", 0.5, 1.0),
)


def run(ctx: SuiteContext) -> SuiteOutcome:
    cfg = ctx.config
    measure, weight = problems.levy_from_config(cfg.levy)
    if measure.mark_dim != 1:
        measure = LevyMeasure.empty()
    T = cfg.problem.horizon

    def make(**shift):
        return build_problem("lq1d", dict(BASE, **shift), horizon=T, levy=measure, jump_weight=weight)

    mc = ctx.mc()
    ens = simulate(make(), TimeGrid(ctx.t0, T, cfg.grids.mc_steps), ctx.x0[:1], 0,
                   cfg.solver.paths, ctx.seed, mc.workers)
    rows = []
    for label, key, lo, hi in PAIRS:
        rep = comparison_check(ens, make(**{key: lo}), make(**{key: hi}), mc.basis,
                               seed=ctx.seed, **mc.solver_kwargs())
        rep.pop("solutions")
        rows.append({"pair": label, "parameter": key, "lower": lo, "upper": hi, **rep})
    table = pd.DataFrame(rows)
    metrics = {
        "pairs": len(rows),
        "max_fraction": float(table["fraction"].max()),
        "violations": int(table["violations"].sum()),
        "min_y0_gap": float(table["y0_gap"].min()),
        "atoms": measure.n_atoms,
    }
    rules = [{"id": "comparison-ordered", "type": "max", "path": "max_fraction", "value": 0.0}]
    return SuiteOutcome(metrics=metrics, rules=rules, tables={"comparison": table})
