"""
Euler simulation of the controlled jump diffusion.

    X_{k+1} = X_k + b dt + sigma dB + sum_a N_a gamma(e_a) - dt sum_a w_a gamma(e_a)

with coefficients frozen at the left endpoint (s_k, X_k, u_k). Jumps are
per-atom Poisson counts, which is equal in law to Poisson(nu(E) dt) totals
with marks drawn from the atom weights.
"""

from __future__ import annotations

import logging
from typing import Any, Dict, Optional, Union

import numpy as np

from domain_kits.errors import PreconditionError, SimulationBlowUpError
from domain_kits.forward_sim import rng
from domain_kits.forward_sim.controls import ControlLaw, ControlTable, as_control_law
from domain_kits.forward_sim.ensemble import PathEnsemble
from domain_kits.forward_sim.grid import TimeGrid
from domain_kits.problem_model.spec import ProblemSpec

logger = logging.getLogger(__name__)


def _initial_state(spec: ProblemSpec, x0) -> np.ndarray:
    x0 = np.atleast_1d(np.asarray(x0, dtype=float))
    if x0.shape != (spec.dim_x,):
        raise PreconditionError("x0 does not match the state dimension",
                                {"x0_shape": list(x0.shape), "dim_x": spec.dim_x})
    if not np.all(np.isfinite(x0)):
        raise PreconditionError("x0 must be finite")
    return x0


def simulate_from_noise(
    spec: ProblemSpec,
    grid: TimeGrid,
    x0,
    control: Union[int, ControlLaw],
    brownian_increments: np.ndarray,
    jump_counts: np.ndarray,
    seed: Optional[int] = None,
    weights: Optional[np.ndarray] = None,
) -> PathEnsemble:
    """Run the Euler scheme on a given noise record."""
    x0 = _initial_state(spec, x0)
    law = as_control_law(control)
    dB = np.asarray(brownian_increments, dtype=float)
    counts = np.asarray(jump_counts, dtype=np.int64)
    M, K = dB.shape[0], grid.steps
    if M < 1:
        raise PreconditionError("n_paths must be >= 1")
    if dB.shape != (M, K, spec.dim_w) or counts.shape != (M, K, spec.levy.n_atoms):
        raise PreconditionError("noise record does not match grid/spec dimensions", {
            "brownian": list(dB.shape), "jumps": list(counts.shape),
            "expected_brownian": [M, K, spec.dim_w], "expected_jumps": [M, K, spec.levy.n_atoms],
        })

    dt = grid.dt
    rates = spec.levy.weights
    states = np.empty((M, K + 1, spec.dim_x))
    states[:, 0] = x0
    cidx = np.empty((M, K), dtype=np.int64)
    for k in range(K):
        t = float(grid.nodes[k])
        x = states[:, k]
        idx = law.indices(k, t, x)
        if idx.shape != (M,) or idx.min() < 0 or idx.max() >= spec.n_controls:
            raise PreconditionError("control law returned an invalid index", {"step": k})
        cidx[:, k] = idx
        u = spec.controls[idx]
        nxt = x + dt * spec.drift(t, x, u)
        nxt = nxt + np.einsum("pij,pj->pi", spec.diffusion(t, x, u), dB[:, k])
        if spec.levy.n_atoms:
            gam = spec.jump_sizes(t, x, u)
            nxt = nxt + np.einsum("pa,apn->pn", counts[:, k], gam) - dt * np.einsum("a,apn->pn", rates, gam)
        bad = ~np.all(np.isfinite(nxt), axis=1)
        if np.any(bad):
            path = int(np.argmax(bad))
            raise SimulationBlowUpError("state became non-finite", path=path, step=k + 1)
        states[:, k + 1] = nxt

    return PathEnsemble(
        grid=grid,
        x0=x0,
        states=states,
        brownian_increments=dB,
        jump_counts=counts,
        control_index=cidx,
        controls_used=spec.controls[cidx],
        seed=seed,
        weights=None if weights is None else np.asarray(weights, dtype=float),
    )


def draw_noise(spec: ProblemSpec, grid: TimeGrid, n_paths: int, seed: int, workers: int = 1):
    """Brownian increments and per-atom jump counts for `n_paths` paths."""
    if int(n_paths) < 1:
        raise PreconditionError("n_paths must be >= 1", {"n_paths": n_paths})
    dB = rng.brownian_increments(seed, n_paths, grid.steps, spec.dim_w, grid.dt, workers)
    counts = rng.jump_counts(seed, n_paths, grid.steps, spec.levy.weights, grid.dt, workers)
    return dB, counts


def simulate(
    spec: ProblemSpec,
    grid: TimeGrid,
    x0,
    control: Union[int, ControlLaw],
    n_paths: int,
    seed: int,
    workers: int = 1,
) -> PathEnsemble:
    """Simulate `n_paths` controlled paths from x0; bit-identical for a fixed seed."""
    dB, counts = draw_noise(spec, grid, n_paths, seed, workers)
    logger.debug("simulate %s: paths=%d steps=%d seed=%d", spec.name, n_paths, grid.steps, seed)
    return simulate_from_noise(spec, grid, x0, control, dB, counts, seed=seed)


def resimulate(spec: ProblemSpec, ensemble: PathEnsemble, x0=None,
               control: Union[int, ControlLaw, None] = None) -> PathEnsemble:
    """Re-run on the noise of `ensemble` with a new start point and/or control."""
    return simulate_from_noise(
        spec, ensemble.grid,
        ensemble.x0 if x0 is None else x0,
        ControlTable(ensemble.control_index) if control is None else control,
        ensemble.brownian_increments, ensemble.jump_counts,
        seed=ensemble.seed, weights=ensemble.weights,
    )


def moment_checks(ensemble: PathEnsemble, x0=None, paired: Optional[PathEnsemble] = None) -> Dict[str, Any]:
    """
    Empirical state-moment statistics:

    sup_moment        E[max_k |X_k|^2]
    increment_ratio   max_k E|X_k - x0|^2 / ((s_k - t0)(1 + |x0|^2))
    stability_ratio   E[max_k |X_k - X'_k|^2] / |x0 - x0'|^2 for a paired ensemble on shared noise
    """
    if ensemble.n_paths < 1 or ensemble.grid.steps < 1:
        raise PreconditionError("moment checks need a non-empty ensemble")
    x0 = ensemble.x0 if x0 is None else np.atleast_1d(np.asarray(x0, dtype=float))
    X = ensemble.states
    sq = np.sum(X ** 2, axis=2)
    sup_sq = sq.max(axis=1)
    inc = ensemble.mean(np.sum((X[:, 1:] - x0) ** 2, axis=2))
    elapsed = ensemble.grid.nodes[1:] - ensemble.grid.t0
    inc_ratio = float(np.max(inc / (elapsed * (1.0 + float(np.dot(x0, x0))))))
    report: Dict[str, Any] = {
        "n_paths": ensemble.n_paths,
        "sup_moment": float(ensemble.mean(sup_sq)),
        "sup_moment_stderr": float(ensemble.stderr(sup_sq)),
        "increment_ratio": inc_ratio,
        "stability_ratio": None,
    }
    if paired is not None:
        if not ensemble.shares_noise_with(paired):
            raise PreconditionError("paired ensemble must share noise")
        gap = float(np.sum((ensemble.x0 - paired.x0) ** 2))
        if gap <= 0.0:
            raise PreconditionError("paired ensemble must start from a different point")
        diff = np.sum((X - paired.states) ** 2, axis=2).max(axis=1)
        report["stability_ratio"] = float(ensemble.mean(diff)) / gap
        report["stability_ratio_stderr"] = float(ensemble.stderr(diff)) / gap
    for key, val in report.items():
        if isinstance(val, float) and not np.isfinite(val):
            raise SimulationBlowUpError(f"moment statistic {key} is not finite", path=-1, step=-1)
    return report


def gronwall_bound(constants: Dict[str, float], horizon: float, margin: float = 0.1) -> float:
    """Reference stability constant exp((2 L_b + L_sigma^2) T) (1 + margin)."""
    rate = 2.0 * constants.get("L_b", 0.0) + constants.get("L_sigma", 0.0) ** 2
    return float(np.exp(rate * horizon) * (1.0 + margin))
