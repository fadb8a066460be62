"""
Cost functional J(t, x; u) = Y_t of the reflected (or penalized) BSDE along
the state controlled by u. Shared by value estimation, the semigroup and
feedback evaluation.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Any, Callable, Dict, Optional, Union

import numpy as np

from domain_kits.errors import PreconditionError
from domain_kits.forward_sim.controls import ControlLaw, as_control_law
from domain_kits.forward_sim.ensemble import PathEnsemble
from domain_kits.forward_sim.grid import TimeGrid
from domain_kits.forward_sim.simulate import simulate, simulate_from_noise
from domain_kits.problem_model.spec import ProblemSpec
from domain_kits.rbsde_solver.basis import RegressionBasis
from domain_kits.rbsde_solver.solution import BackwardSolution
from domain_kits.rbsde_solver.solver import solve_penalized, solve_reflected
from domain_kits.rbsde_solver.tree_oracle import tree_noise


@dataclass(frozen=True)
class McConfig:
    """Monte Carlo settings; enumerate_tree swaps sampling for the full binary tree."""

    n_paths: int = 20000
    steps: int = 50
    seed: int = 0
    basis: RegressionBasis = field(default_factory=RegressionBasis)
    workers: int = 1
    enumerate_tree: bool = False
    max_iters: int = 50
    tol: float = 1e-12
    damping: float = 1.0

    def solver_kwargs(self) -> Dict[str, Any]:
        return {"max_iters": self.max_iters, "tol": self.tol, "damping": self.damping}

    def to_dict(self) -> Dict[str, Any]:
        return {
            "n_paths": self.n_paths, "steps": self.steps, "seed": self.seed,
            "basis": self.basis.to_dict(), "enumerate_tree": self.enumerate_tree,
            "max_iters": self.max_iters, "tol": self.tol, "damping": self.damping,
        }


@dataclass(frozen=True, eq=False)
class CostEstimate:
    value: float
    stderr: float
    control: Dict[str, Any]
    solution: BackwardSolution
    ensemble: PathEnsemble


def controlled_ensemble(spec: ProblemSpec, grid: TimeGrid, x, control: Union[int, ControlLaw],
                        config: McConfig) -> PathEnsemble:
    if config.enumerate_tree:
        dB, counts, weights = tree_noise(spec, grid)
        return simulate_from_noise(spec, grid, x, control, dB, counts, weights=weights)
    return simulate(spec, grid, x, control, config.n_paths, config.seed, config.workers)


def cost_functional(
    spec: ProblemSpec,
    t: float,
    x,
    control: Union[int, ControlLaw],
    config: McConfig,
    mode: str = "reflected",
    n: Optional[float] = None,
    until: Optional[float] = None,
    terminal: Optional[Callable[[np.ndarray], np.ndarray]] = None,
) -> CostEstimate:
    """
    Y_t on [t, until] started from x under `control`.

    `terminal` replaces Phi at `until` (the semigroup G_{t,until}[eta]); all
    controls of one call sequence share noise through the config seed.
    """
    end = spec.horizon if until is None else float(until)
    if not 0.0 <= t < end <= spec.horizon:
        raise PreconditionError("need 0 <= t < until <= T", {"t": t, "until": end, "T": spec.horizon})
    grid = TimeGrid(float(t), end, config.steps)
    law = as_control_law(control)
    ens = controlled_ensemble(spec, grid, x, law, config)
    term = None if terminal is None else np.asarray(terminal(ens.states[:, -1]), dtype=float)
    if mode == "reflected":
        sol = solve_reflected(ens, spec, config.basis, terminal_values=term, **config.solver_kwargs())
    elif mode == "penalized":
        if n is None:
            raise PreconditionError("penalized cost needs a penalty level n")
        sol = solve_penalized(ens, spec, n, config.basis, terminal_values=term, **config.solver_kwargs())
    else:
        raise PreconditionError(f"unknown mode {mode!r}")
    return CostEstimate(sol.y0, sol.y0_stderr, law.describe(), sol, ens)
