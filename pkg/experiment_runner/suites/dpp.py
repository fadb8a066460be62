"""Semigroup identity W(t, x) = min_u G_{t,t+dt}[W(t+dt, X_{t+dt})] on known value functions."""

from __future__ import annotations

import numpy as np
import pandas as pd

from domain_kits.forward_sim import TimeGrid
from domain_kits.hjb_pide import SpaceGrid, ValueSurface
from domain_kits.problem_model import build_problem
from domain_kits.rbsde_solver import TREE_INSTANCES, McConfig, RegressionBasis, tree_value
from domain_kits.value_analysis import dpp_check
from experiment_runner.suites.base import SuiteContext, SuiteOutcome

HEAT_SIGMA = 0.5
HEAT_X = 0.5
HEAT_STEPS = 10
N_STDERR = 4.0
HEAT_SLACK = 1e-3
TREE_TOL = 1e-9


def _heat_value(t, X):
    return X[:, 0] ** 2 + HEAT_SIGMA ** 2 * (1.0 - t)


def _tree_surface(inst, spec):
    times = TimeGrid(0.0, inst.horizon, inst.steps)

    def exact(t, X):
        if t >= inst.horizon - 1e-12:
            return spec.terminal(X)
        rest = TimeGrid(t, inst.horizon, int(round((inst.horizon - t) / times.dt)))
        return np.array([tree_value(spec, rest, x, policy="optimal") for x in X])

    return times, ValueSurface.from_function(times, SpaceGrid.uniform(-2.0, 2.0, 41), exact)


def _row(problem, check, tolerance):
    row = {k: v for k, v in check.items() if k != "semigroup"}
    return {"problem": problem, **row, "tolerance": tolerance}


def run(ctx: SuiteContext) -> SuiteOutcome:
    cfg = ctx.config
    rows = []

    heat = build_problem("lq1d", {"sigma0": HEAT_SIGMA, "phi2": 1.0})
    surface = ValueSurface.from_function(TimeGrid(0.0, 1.0, 20), SpaceGrid.uniform(-4.0, 4.0, 801), _heat_value)
    mc = ctx.mc(steps=HEAT_STEPS)
    for frac in cfg.solver.dpp_fractions:
        check = dpp_check(heat, surface, 0.0, [HEAT_X], frac * heat.horizon, mc)
        rows.append(_row("heat", check, N_STDERR * check["stderr"] + HEAT_SLACK))

    inst = TREE_INSTANCES["controlled"]
    spec = inst.spec()
    times, exact = _tree_surface(inst, spec)
    one_step = McConfig(steps=1, enumerate_tree=True, basis=RegressionBasis.exact())
    check = dpp_check(spec, exact, 0.0, [inst.x0], times.dt, one_step)
    rows.append(_row("tree:controlled", check, TREE_TOL))

    table = pd.DataFrame(rows)
    metrics = {
        "checks": len(rows),
        "max_excess_over_tolerance": float((table["residual"] - table["tolerance"]).max()),
        "max_residual": float(table["residual"].max()),
        "tree_residual": float(table["residual"].iloc[-1]),
    }
    rules = [
        {"id": "dpp-within-tolerance", "type": "max", "path": "max_excess_over_tolerance", "value": 0.0},
        {"id": "dpp-tree", "type": "max", "path": "tree_residual", "value": TREE_TOL},
    ]
    return SuiteOutcome(metrics=metrics, rules=rules, tables={"dpp": table})
