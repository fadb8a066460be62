"""Minimality of the push: E sum (h - Y) dA vanishes for reflected solutions."""

from __future__ import annotations

import pandas as pd

from domain_kits.forward_sim import TimeGrid, simulate
from domain_kits.rbsde_solver import (
    TREE_INSTANCES,
    RegressionBasis,
    apriori_report,
    obstacle_excess,
    skorokhod_residual,
    solve_reflected,
    tree_ensemble,
)
from experiment_runner.suites.base import SuiteContext, SuiteOutcome

SKOROKHOD_TOL = 1e-9


def run(ctx: SuiteContext) -> SuiteOutcome:
    spec, cfg = ctx.spec, ctx.config
    mc = ctx.mc()
    ens = simulate(spec, TimeGrid(ctx.t0, spec.horizon, cfg.grids.mc_steps), ctx.x0, 0,
                   cfg.solver.paths, ctx.seed, mc.workers)
    sol = solve_reflected(ens, spec, mc.basis, **mc.solver_kwargs())
    rows = [{
        "problem": spec.name,
        "residual": skorokhod_residual(sol, ens, spec),
        "obstacle_excess": obstacle_excess(sol, ens, spec),
        "push_total": float(ens.mean(sol.A[:, -1])),
    }]
    apriori = apriori_report(sol, ens)

    exact = RegressionBasis.exact()
    for name, inst in TREE_INSTANCES.items():
        tspec = inst.spec()
        tens = tree_ensemble(tspec, inst.grid, [inst.x0], control=0)
        tsol = solve_reflected(tens, tspec, exact)
        rows.append({
            "problem": f"tree:{name}",
            "residual": skorokhod_residual(tsol, tens, tspec),
            "obstacle_excess": obstacle_excess(tsol, tens, tspec),
            "push_total": float(tens.mean(tsol.A[:, -1])),
        })
    table = pd.DataFrame(rows)
    metrics = {
        "max_abs_residual": float(table["residual"].abs().max()),
        "max_obstacle_excess": float(table["obstacle_excess"].max()),
        "problems": len(rows),
        "apriori_total": apriori["total"],
        "tolerance": SKOROKHOD_TOL,
    }
    rules = [
        {"id": "skorokhod-residual", "type": "max", "path": "max_abs_residual", "value_path": "tolerance"},
        {"id": "skorokhod-below-obstacle", "type": "max", "path": "max_obstacle_excess", "value_path": "tolerance"},
    ]
    return SuiteOutcome(metrics=metrics, rules=rules, tables={"skorokhod": table},
                        reports={"apriori": apriori})
