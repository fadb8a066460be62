"""Closed-form heat problems: the quadratic is reproduced at the nodes, the cosine converges at first order in dt."""

from __future__ import annotations

import math

import numpy as np
import pandas as pd

from domain_kits.forward_sim import TimeGrid
from domain_kits.hjb_pide import PdeGrids, SpaceGrid, refinement_study, solve_penalized_hjb
from domain_kits.problem_model import build_problem
from experiment_runner.suites.base import SuiteContext, SuiteOutcome

DEFAULT_SIGMA = 0.5
COSINE = {"a": 0.0, "sigma0": math.sqrt(2.0), "s1": 0.0, "jump_c": 0.0, "q": 0.0, "ru": 0.0, "phi": 1.0}
COSINE_PROBES = np.array([[0.0], [math.pi / 5], [-2 * math.pi / 5]])


def _sigma(ctx: SuiteContext) -> float:
    if ctx.config.problem.family == "lq1d":
        return float(ctx.config.problem.params.get("sigma0", DEFAULT_SIGMA))
    return DEFAULT_SIGMA


def run(ctx: SuiteContext) -> SuiteOutcome:
    cfg = ctx.config
    sigma = _sigma(ctx)
    T = cfg.problem.horizon
    spec = build_problem("lq1d", {"sigma0": sigma, "phi2": 1.0}, horizon=T)
    grids = ctx.grids(dim=1)
    surface = solve_penalized_hjb(spec, grids, 0.0)

    X = grids.space.nodes()[:, 0]
    half = 0.5 * max(abs(cfg.grids.space_lo), abs(cfg.grids.space_hi))
    inner = np.abs(X) <= half
    exact = X ** 2 + sigma ** 2 * (T - cfg.grids.t0)
    quad_err = float(np.max(np.abs(surface.values[0] - exact)[inner]))

    coarse = PdeGrids(TimeGrid(0.0, 1.0, 25), SpaceGrid.uniform(-2 * math.pi, 2 * math.pi, 41))
    study = refinement_study(
        build_problem("trig", COSINE), coarse, COSINE_PROBES, levels=3, mode="penalized", n=0.0,
        reference=lambda t, x: math.exp(-(1.0 - t)) * np.cos(x[:, 0]),
    )
    orders = [o for o in study["orders"] if o is not None]

    metrics = {
        "sigma": sigma,
        "quadratic_max_error": quad_err,
        "quadratic_nodes": int(inner.sum()),
        "cosine_errors": [row["error"] for row in study["levels"]],
        "cosine_orders": study["orders"],
        "cosine_min_order": min(orders) if len(orders) == len(study["orders"]) else None,
        "closed_form_max": cfg.solver.tolerances.closed_form_max,
        "min_order": cfg.solver.tolerances.min_order,
    }
    rules = [
        {"id": "heat-quadratic", "type": "max", "path": "quadratic_max_error", "value_path": "closed_form_max"},
        {"id": "heat-cosine-order", "type": "min", "path": "cosine_min_order", "value_path": "min_order"},
    ]
    table = pd.DataFrame({"x": X, "W": surface.values[0], "exact": exact})
    return SuiteOutcome(
        metrics=metrics,
        rules=rules,
        tables={"quadratic_t0": table},
        reports={"cosine_refinement": study},
    )
