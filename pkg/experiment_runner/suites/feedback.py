"""Feedback synthesized from the grid value: no worse than any constant control, and consistent with Z and Gamma."""

from __future__ import annotations

import math

import pandas as pd

from domain_kits.contract_invariants import ToleranceConfig
from domain_kits.feedback import evaluate_policy, synthesize, verification_diagnostics
from domain_kits.hjb_pide import solve_obstacle_hjb
from domain_kits.rbsde_solver import cost_functional
from experiment_runner.suites.base import SuiteContext, SuiteOutcome


def run(ctx: SuiteContext) -> SuiteOutcome:
    spec, cfg = ctx.spec, ctx.config
    delta = cfg.solver.delta
    tol = cfg.solver.tolerances
    n_stderr = ToleranceConfig.for_monte_carlo().n_stderr

    surface = solve_obstacle_hjb(spec, ctx.grids(), delta)
    policy = synthesize(surface, spec, delta)
    mc = ctx.mc()
    pol = evaluate_policy(spec, policy, ctx.t0, ctx.x0, mc)
    w = surface.interpolate(ctx.t0, ctx.x0)

    rows = []
    for j in range(spec.n_controls):
        const = cost_functional(spec, ctx.t0, ctx.x0, j, mc)
        band = n_stderr * math.sqrt(pol.stderr ** 2 + const.stderr ** 2)
        rows.append({
            "control_index": j,
            "value": const.value,
            "stderr": const.stderr,
            "policy_excess": pol.value - const.value - band,
            "lower_bound_excess": w - const.value - n_stderr * const.stderr,
        })
    table = pd.DataFrame(rows)
    diag = verification_diagnostics(spec, policy, surface, pol.ensemble, pol.solution)

    metrics = {
        "policy_value": pol.value,
        "policy_stderr": pol.stderr,
        "best_constant": float(table["value"].min()),
        "W_pde": w,
        "max_policy_excess": float(table["policy_excess"].max()),
        "max_lower_bound_excess": float(table["lower_bound_excess"].max()),
        "z_relative_error": diag["z_relative_error"],
        "gamma_relative_error": diag["gamma_relative_error"],
        "value_gap": diag["value_gap"],
        "diagnostics_max": tol.diagnostics_max,
        "combined_max": tol.combined_max,
        "usage": policy.describe().get("usage"),
    }
    rules = [
        {"id": "feedback-beats-constants", "type": "max", "path": "max_policy_excess", "value": 0.0},
        {"id": "feedback-lower-bound", "type": "max", "path": "max_lower_bound_excess", "value_path": "combined_max"},
        {"id": "feedback-z", "type": "max", "path": "z_relative_error", "value_path": "diagnostics_max"},
    ]
    if spec.levy.n_atoms:
        rules.append({"id": "feedback-gamma", "type": "max", "path": "gamma_relative_error",
                      "value_path": "diagnostics_max"})
    return SuiteOutcome(
        metrics=metrics,
        rules=rules,
        tables={"constants": table, "policy": policy.to_frame()},
        reports={"diagnostics": diag},
    )
