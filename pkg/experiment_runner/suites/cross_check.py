"""Grid value against the Monte Carlo value at (t0, x0), within scheme and sampling error."""

from __future__ import annotations

from domain_kits.contract_invariants import ToleranceConfig
from domain_kits.hjb_pide import solve_obstacle_hjb
from domain_kits.value_analysis import value_mc
from experiment_runner import problems
from experiment_runner.suites.base import SuiteContext, SuiteOutcome


def run(ctx: SuiteContext) -> SuiteOutcome:
    spec, cfg = ctx.spec, ctx.config
    delta = cfg.solver.delta
    grids = ctx.grids()
    surface = solve_obstacle_hjb(spec, grids, delta)
    fine = solve_obstacle_hjb(spec, problems.refined(grids), delta)
    w = surface.interpolate(ctx.t0, ctx.x0)
    w_fine = fine.interpolate(ctx.t0, ctx.x0)
    scheme_error = abs(w - w_fine)

    est = value_mc(spec, ctx.t0, ctx.x0, ctx.mc(), surface=surface, delta=delta)
    n_stderr = ToleranceConfig.for_monte_carlo().n_stderr
    tolerance = n_stderr * (scheme_error + est.stderr)
    metrics = {
        "W_pde": w,
        "W_pde_refined": w_fine,
        "scheme_error": scheme_error,
        "value_mc": est.value,
        "value_mc_stderr": est.stderr,
        "value_mc_label": est.label,
        "best_control": est.best,
        "difference": abs(w - est.value),
        "tolerance": tolerance,
        "tolerance_cap": cfg.solver.tolerances.combined_max,
        "atoms": spec.levy.n_atoms,
    }
    rules = [
        {"id": "cross-check", "type": "max", "path": "difference", "value_path": "tolerance"},
        {"id": "cross-check-resolution", "type": "max", "path": "tolerance", "value_path": "tolerance_cap"},
    ]
    return SuiteOutcome(
        metrics=metrics,
        rules=rules,
        tables={"obstacle_surface": surface.to_frame()},
        reports={"value_mc": est.to_dict()},
    )
