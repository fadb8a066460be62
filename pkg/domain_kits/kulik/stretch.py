"""
Forward simulation on the stretched clock.

The path started at (t_i, x_i) and read through rho_i lives on [t_lambda, T]
and solves

    dX = b(rho_i(s), X, u) / r ds + sigma(rho_i(s), X, u) / sqrt(r) dB
         + int gamma(rho_i(s), X-, u, e) (N~(ds, de) + (1 - 1/r) nu(de) ds)

with r = rate(i). Simulating it with the ordinary Euler scheme and attaching
girsanov_weight per path gives an ensemble whose weighted statistics are those
of the original path on [t_i, T].
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Any, Dict, Union

import numpy as np

from domain_kits.forward_sim.controls import ControlLaw
from domain_kits.forward_sim.ensemble import PathEnsemble
from domain_kits.forward_sim.grid import TimeGrid
from domain_kits.forward_sim.simulate import simulate
from domain_kits.kulik.time_change import TimeChange, rho
from domain_kits.kulik.weight import girsanov_weight
from domain_kits.problem_model.spec import ProblemSpec


def stretched_forward_spec(spec: ProblemSpec, tc: TimeChange, i: int) -> ProblemSpec:
    """Forward coefficients on the stretched clock.

    Only drift, diffusion and jump sizes are transformed; driver, terminal
    and obstacle are read at the original time rho_i(s).
    """
    r = tc.rate(i)
    root = np.sqrt(r)
    rates = spec.levy.weights

    def clock(s):
        return float(rho(tc, i, s))

    def drift(s, x, u):
        t = clock(s)
        out = spec.drift(t, x, u) / r
        if spec.levy.n_atoms:
            out = out + (1.0 - 1.0 / r) * np.einsum("a,apn->pn", rates, spec.jump_sizes(t, x, u))
        return out

    def diffusion(s, x, u):
        return spec.diffusion(clock(s), x, u) / root

    def jump(s, x, u, e):
        return spec.jump(clock(s), x, u, e)

    def driver(s, x, y, z, v, u):
        return spec.driver(clock(s), x, y, z, v, u)

    def obstacle(s, x):
        return spec.obstacle(clock(s), x)

    return spec.with_updates(drift=drift, diffusion=diffusion, jump=jump, driver=driver,
                             obstacle=obstacle, name=f"{spec.name}-stretched-{i}")


@dataclass(frozen=True, eq=False)
class StretchedEnsemble:
    """Paths on [t_lambda, T]; `clock` holds rho_i of every node, `weights` the per-path g."""

    ensemble: PathEnsemble
    time_change: TimeChange
    index: int
    clock: np.ndarray
    weights: np.ndarray
    nu_mass: float

    @property
    def jump_totals(self) -> np.ndarray:
        return self.ensemble.jump_counts.sum(axis=(1, 2))

    def mean(self, values: np.ndarray, weighted: bool = True) -> np.ndarray:
        values = np.asarray(values, dtype=float)
        if not weighted:
            return values.mean(axis=0)
        return np.tensordot(self.weights, values, axes=(0, 0)) / len(self.weights)

    def stderr(self, values: np.ndarray, weighted: bool = True) -> np.ndarray:
        values = np.asarray(values, dtype=float)
        if weighted:
            values = values * self.weights.reshape((-1,) + (1,) * (values.ndim - 1))
        return values.std(axis=0, ddof=1) / np.sqrt(values.shape[0])

    def summary(self) -> Dict[str, Any]:
        return {
            "time_change": self.time_change.to_dict(),
            "index": self.index,
            "clock": [float(self.clock[0]), float(self.clock[-1])],
            "paths": self.ensemble.n_paths,
            "mean_weight": float(self.weights.mean()),
            "weight_stderr": float(self.weights.std(ddof=1) / np.sqrt(len(self.weights))),
        }


def stretched_simulate(
    spec: ProblemSpec,
    tc: TimeChange,
    i: int,
    x0,
    control: Union[int, ControlLaw],
    n_paths: int,
    seed: int,
    steps: int = 50,
    workers: int = 1,
) -> StretchedEnsemble:
    """Simulate from x0 at t_lambda on the stretched clock and weight each path."""
    grid = TimeGrid(tc.t_lambda, tc.T, steps)
    ens = simulate(stretched_forward_spec(spec, tc, i), grid, x0, control, n_paths, seed, workers)
    nu_mass = float(np.sum(spec.levy.weights))
    g = girsanov_weight(tc, i, ens.jump_counts.sum(axis=(1, 2)), nu_mass)
    return StretchedEnsemble(
        ensemble=ens,
        time_change=tc,
        index=int(i),
        clock=np.asarray(rho(tc, i, grid.nodes)),
        weights=np.atleast_1d(g),
        nu_mass=nu_mass,
    )
