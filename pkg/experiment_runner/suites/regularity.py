"""Semiconcavity and joint Lipschitz estimates of the grid value, stable under refinement."""

from __future__ import annotations

import numpy as np

from domain_kits.hjb_pide import solve_obstacle_hjb
from domain_kits.value_analysis import regularity_probe
from experiment_runner import problems
from experiment_runner.suites.base import SuiteContext, SuiteOutcome

SEPARATION_CELLS = 10.0
FLOOR = 1e-2


def relative_change(a: float, b: float) -> float:
    return abs(a - b) / max(abs(a), abs(b), FLOOR)


def run(ctx: SuiteContext) -> SuiteOutcome:
    spec, cfg = ctx.spec, ctx.config
    delta = cfg.solver.delta
    grids = ctx.grids()
    coarse = solve_obstacle_hjb(spec, grids, delta)
    fine = solve_obstacle_hjb(spec, problems.refined(grids), delta)

    margin = 0.1 * (spec.horizon - ctx.t0)
    # keeps the pair apart from the kinks of the piecewise-linear interpolant
    separation = SEPARATION_CELLS * max(float(np.max(grids.space.spacing)), grids.time.dt)
    kwargs = dict(triples=cfg.solver.regularity_triples, seed=ctx.seed, margin=margin,
                  min_separation=separation)
    rep_coarse = regularity_probe(coarse, **kwargs)
    rep_fine = regularity_probe(fine, **kwargs)

    metrics = {
        "semiconcavity": rep_fine.semiconcavity,
        "semiconcavity_coarse": rep_coarse.semiconcavity,
        "joint_lipschitz": rep_fine.joint_lipschitz,
        "joint_lipschitz_coarse": rep_coarse.joint_lipschitz,
        "lipschitz_x": rep_fine.lipschitz_x,
        "semiconcavity_change": relative_change(rep_coarse.semiconcavity, rep_fine.semiconcavity),
        "joint_lipschitz_change": relative_change(rep_coarse.joint_lipschitz, rep_fine.joint_lipschitz),
        "used_probes": rep_fine.probes - rep_fine.skipped,
        "stability_rel": cfg.solver.tolerances.stability_rel,
    }
    rules = [
        {"id": "regularity-semiconcavity-finite", "type": "type_is", "path": "semiconcavity", "expected": "number"},
        {"id": "regularity-lipschitz-finite", "type": "type_is", "path": "joint_lipschitz", "expected": "number"},
        {"id": "regularity-semiconcavity-stable", "type": "max", "path": "semiconcavity_change",
         "value_path": "stability_rel"},
        {"id": "regularity-lipschitz-stable", "type": "max", "path": "joint_lipschitz_change",
         "value_path": "stability_rel"},
        {"id": "regularity-probes-used", "type": "min", "path": "used_probes", "value": 1},
    ]
    return SuiteOutcome(
        metrics=metrics,
        rules=rules,
        reports={"coarse": rep_coarse.to_dict(), "fine": rep_fine.to_dict()},
    )
