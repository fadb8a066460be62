"""Zero data everywhere: every surface and every backward solution must be identically zero."""

from __future__ import annotations

import numpy as np

from domain_kits.forward_sim import TimeGrid, simulate
from domain_kits.hjb_pide import solve_obstacle_hjb, solve_penalized_hjb
from domain_kits.problem_model import build_problem
from domain_kits.rbsde_solver import solve_penalized, solve_reflected
from experiment_runner.suites.base import SuiteContext, SuiteOutcome

MAX_PATHS = 2000


def run(ctx: SuiteContext) -> SuiteOutcome:
    cfg = ctx.config
    spec = build_problem("zero", {"f_const": 0.0, "phi_const": 0.0, "h_const": 0.0},
                         horizon=cfg.problem.horizon, name="trivial-zero")
    grids = ctx.grids(dim=1)
    level = cfg.solver.ladder[-1]
    obstacle = solve_obstacle_hjb(spec, grids)
    penalized = solve_penalized_hjb(spec, grids, level)

    mc = ctx.mc()
    grid = TimeGrid(ctx.t0, spec.horizon, cfg.grids.mc_steps)
    ens = simulate(spec, grid, [0.0], 0, min(cfg.solver.paths, MAX_PATHS), ctx.seed, mc.workers)
    refl = solve_reflected(ens, spec, mc.basis, **mc.solver_kwargs())
    pen = solve_penalized(ens, spec, level, mc.basis, **mc.solver_kwargs())

    metrics = {
        "obstacle_surface_max_abs": float(np.max(np.abs(obstacle.values))),
        "penalized_surface_max_abs": float(np.max(np.abs(penalized.values))),
        "reflected_Y_max_abs": float(np.max(np.abs(refl.Y))),
        "penalized_Y_max_abs": float(np.max(np.abs(pen.Y))),
        "reflected_y0": refl.y0,
        "penalty": level,
    }
    rules = [
        {"id": f"{key}-zero", "type": "max", "path": key, "value": 0.0}
        for key in ("obstacle_surface_max_abs", "penalized_surface_max_abs",
                    "reflected_Y_max_abs", "penalized_Y_max_abs")
    ]
    return SuiteOutcome(
        metrics=metrics,
        rules=rules,
        tables={"obstacle_surface": obstacle.to_frame(), "penalized_surface": penalized.to_frame()},
    )
