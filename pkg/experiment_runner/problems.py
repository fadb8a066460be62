"""Config sections to kit objects: the problem, Monte Carlo settings and PDE grids."""

from __future__ import annotations

import logging
from typing import Optional, Tuple

from domain_kits.forward_sim import TimeGrid
from domain_kits.hjb_pide import PdeGrids, SpaceGrid
from domain_kits.problem_model import (
    JumpWeight,
    LevyMeasure,
    ProblemSpec,
    ValidationReport,
    build_problem,
    validate_assumptions,
)
from domain_kits.rbsde_solver import McConfig, RegressionBasis
from experiment_runner.schemas import BasisConfig, ExperimentConfig, LevyConfig

logger = logging.getLogger(__name__)


def levy_from_config(levy: LevyConfig) -> Tuple[LevyMeasure, JumpWeight]:
    measure = LevyMeasure.from_atoms([(a.mark, a.weight) for a in levy.atoms])
    if levy.jump_weight == "truncated":
        weight = JumpWeight.truncated(levy.kappa, levy.scale)
    else:
        weight = JumpWeight.zero(levy.kappa)
    return measure, weight


def basis_from_config(basis: BasisConfig) -> RegressionBasis:
    if basis.kind == "exact":
        return RegressionBasis.exact()
    if basis.kind == "local-partition":
        return RegressionBasis.local_partition(basis.cells, basis.box)
    return RegressionBasis.polynomial(basis.degree, basis.box)


def build_spec(config: ExperimentConfig) -> ProblemSpec:
    """ProblemSpec from the problem, levy and controls sections (no validation gate)."""
    measure, weight = levy_from_config(config.levy)
    return build_problem(
        config.problem.family,
        dict(config.problem.params),
        horizon=config.problem.horizon,
        levy=measure,
        jump_weight=weight,
        controls=config.controls.values(),
        name=config.problem.name or config.name,
    )


def validated_spec(config: ExperimentConfig) -> Tuple[ProblemSpec, ValidationReport]:
    """Build the ProblemSpec and pass it through the assumption gate; AssumptionError on failure."""
    spec = build_spec(config)
    g = config.grids
    report = validate_assumptions(spec, seed=config.solver.seed, box=(g.space_lo, g.space_hi))
    report.raise_for_gate()
    logger.info("problem %s validated: %d checks, all gate checks passed", spec.name, len(report.checks))
    return spec, report


def mc_config(config: ExperimentConfig, threads: int = 1, seed: Optional[int] = None,
              **overrides) -> McConfig:
    s = config.solver
    kwargs = dict(
        n_paths=s.paths, steps=config.grids.mc_steps, seed=s.seed if seed is None else int(seed),
        basis=basis_from_config(s.basis), workers=max(1, int(threads)),
        max_iters=s.max_iters, tol=s.tol, damping=s.damping,
    )
    kwargs.update(overrides)
    return McConfig(**kwargs)


def pde_grids(config: ExperimentConfig, dim: int = 1) -> PdeGrids:
    g = config.grids
    return PdeGrids(
        TimeGrid(g.t0, config.problem.horizon, g.pde_steps),
        SpaceGrid.uniform(g.space_lo, g.space_hi, g.space_points, dim=dim),
    )


def refined(grids: PdeGrids, space_factor: int = 2, time_factor: int = 4) -> PdeGrids:
    """One refinement level: space spacing / space_factor, time step / time_factor."""
    t = grids.time
    return PdeGrids(TimeGrid(t.t0, t.T, t.steps * time_factor), grids.space.refined(space_factor))
