"""Penalized HJB surfaces on one grid: W^n >= W^{n'} >= W node-wise for n < n'."""

from __future__ import annotations

import numpy as np
import pandas as pd

from domain_kits.contract_invariants import ToleranceConfig
from domain_kits.hjb_pide import box_study, cfl_number, hjb_residual, solve_obstacle_hjb, solve_penalized_hjb
from experiment_runner.suites.base import SuiteContext, SuiteOutcome


def run(ctx: SuiteContext) -> SuiteOutcome:
    spec, cfg = ctx.spec, ctx.config
    grids = ctx.grids()
    delta = cfg.solver.delta
    levels = list(cfg.solver.ladder)
    surfaces = [solve_penalized_hjb(spec, grids, n, delta) for n in levels]
    obstacle = solve_obstacle_hjb(spec, grids, delta)

    rows = []
    worst = -np.inf
    for i, (n, surf) in enumerate(zip(levels, surfaces)):
        step_up = np.nan
        if i + 1 < len(surfaces):
            step_up = float(np.max(surfaces[i + 1].values - surf.values))
            worst = max(worst, step_up)
        rows.append({
            "n": n,
            "W_at_start": surf.interpolate(ctx.t0, ctx.x0),
            "sup_gap_to_obstacle": float(np.max(np.abs(surf.values - obstacle.values))),
            "max_increase_to_next": step_up,
        })
    below = float(np.max(obstacle.values - surfaces[-1].values))
    residual = hjb_residual(obstacle, spec, delta)

    tol = ToleranceConfig.for_scheme()
    metrics = {
        "levels": levels,
        "time_steps": grids.time.steps,
        "space_points": list(grids.space.points),
        "cfl": cfl_number(spec, grids, delta),
        "max_increase": worst if len(levels) > 1 else 0.0,
        "obstacle_above_top_level": below,
        "W_obstacle_at_start": obstacle.interpolate(ctx.t0, ctx.x0),
        "hjb_residual_worst": residual["worst"],
        "hjb_residual_max_abs": residual["max_abs"],
        "tolerance": tol.bound(),
    }
    reports = {"hjb_residual": residual}
    if cfg.solver.box_study:
        reports["box_study"] = box_study(spec, grids, ctx.x0[None, :], delta=delta)
        metrics["box_study_max_diff"] = reports["box_study"]["max_diff"]
    rules = [
        {"id": "pde-ladder-ordered", "type": "max", "path": "max_increase", "value_path": "tolerance"},
        {"id": "pde-obstacle-below", "type": "max", "path": "obstacle_above_top_level", "value_path": "tolerance"},
    ]
    return SuiteOutcome(
        metrics=metrics,
        rules=rules,
        tables={
            "pde_ladder": pd.DataFrame(rows),
            "obstacle_surface": obstacle.to_frame(),
            f"penalized_surface_n{levels[-1]:g}": surfaces[-1].to_frame(),
        },
        reports=reports,
    )
