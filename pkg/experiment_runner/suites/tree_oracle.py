"""Bundled binary-tree instances: solver, penalized solver and value_mc against exhaustive enumeration."""

from __future__ import annotations

import pandas as pd

from domain_kits.contract_invariants import ToleranceConfig
from domain_kits.forward_sim import TimeGrid
from domain_kits.hjb_pide import PdeGrids, SpaceGrid, solve_obstacle_hjb
from domain_kits.rbsde_solver import (
    TREE_INSTANCES,
    McConfig,
    RegressionBasis,
    solve_penalized,
    solve_reflected,
    tree_ensemble,
    tree_value,
)
from domain_kits.value_analysis import value_mc
from experiment_runner.suites.base import SuiteContext, SuiteOutcome

PENALTY = 4.0
# grid for the feedback candidate on instances with more than one control
FEEDBACK_STEPS = 100
FEEDBACK_SPACE = (-2.0, 2.0, 41)


def _feedback_surface(spec, horizon: float):
    if spec.n_controls < 2:
        return None
    lo, hi, points = FEEDBACK_SPACE
    return solve_obstacle_hjb(spec, PdeGrids(TimeGrid(0.0, horizon, FEEDBACK_STEPS),
                                             SpaceGrid.uniform(lo, hi, points)))


def run(ctx: SuiteContext) -> SuiteOutcome:
    exact = RegressionBasis.exact()
    rows = []
    for name, inst in TREE_INSTANCES.items():
        spec, grid, x0 = inst.spec(), inst.grid, [inst.x0]
        ens = tree_ensemble(spec, grid, x0, control=0)
        refl = solve_reflected(ens, spec, exact)
        pen = solve_penalized(ens, spec, PENALTY, exact)
        cfg = McConfig(steps=inst.steps, enumerate_tree=True, basis=exact, seed=ctx.seed)
        est = value_mc(spec, 0.0, x0, cfg, surface=_feedback_surface(spec, inst.horizon))

        oracle_refl = tree_value(spec, grid, x0, "reflected", policy=0)
        oracle_pen = tree_value(spec, grid, x0, "penalized", n=PENALTY, policy=0)
        oracle_constant = min(tree_value(spec, grid, x0, "reflected", policy=j) for j in range(spec.n_controls))
        optimal = tree_value(spec, grid, x0, "reflected", policy="optimal")
        rows.append({
            "instance": name,
            "oracle_reflected": oracle_refl,
            "solver_reflected": refl.y0,
            "oracle_penalized": oracle_pen,
            "solver_penalized": pen.y0,
            "oracle_constant": oracle_constant,
            "optimal_value": optimal,
            "value_mc": est.value,
            "best_candidate": est.best["kind"],
            "gap": max(abs(refl.y0 - oracle_refl), abs(pen.y0 - oracle_pen), abs(est.value - optimal)),
        })
    table = pd.DataFrame(rows)
    tol = ToleranceConfig.for_tree_oracle()
    metrics = {
        "instances": len(rows),
        "max_gap": float(table["gap"].max()),
        "max_gap_reflected": float((table["solver_reflected"] - table["oracle_reflected"]).abs().max()),
        "max_gap_penalized": float((table["solver_penalized"] - table["oracle_penalized"]).abs().max()),
        "max_gap_optimal": float((table["value_mc"] - table["optimal_value"]).abs().max()),
        "penalty": PENALTY,
        "tolerance": tol.bound(),
    }
    rules = [
        {"id": "tree-gap", "type": "max", "path": "max_gap", "value_path": "tolerance"},
        {"id": "tree-optimal", "type": "max", "path": "max_gap_optimal", "value_path": "tolerance"},
        {"id": "tree-instances", "type": "min", "path": "instances", "value": len(TREE_INSTANCES)},
    ]
    return SuiteOutcome(metrics=metrics, rules=rules, tables={"tree_oracle": table})
