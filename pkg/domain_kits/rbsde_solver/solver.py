"""
Backward induction for the penalized and reflected BSDE with jumps.

At node k the conditional expectations come from one regression of
Y_{k+1} on the basis at X_k, then a second regression of the centered
martingale statistics

    (Y_{k+1} - C_k) dB_k / dt           -> Z_k
    (Y_{k+1} - C_k) W_k / dt            -> Gamma_k
    W_k = sum_a N_a l(e_a) - dt sum_a w_a l(e_a)

Gamma_k estimates the driver aggregate int l(e) V(e) nu(de) directly; per-mark
V(e) is never regressed.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field
from typing import Any, Dict, List, Optional, Sequence

import numpy as np
import pandas as pd

from domain_kits.errors import PreconditionError
from domain_kits.forward_sim.ensemble import PathEnsemble
from domain_kits.problem_model.spec import ProblemSpec
from domain_kits.rbsde_solver.basis import RegressionBasis
from domain_kits.rbsde_solver.implicit import solve_step
from domain_kits.rbsde_solver.solution import PENALIZED, REFLECTED, BackwardSolution

logger = logging.getLogger(__name__)


def _check_dimensions(ensemble: PathEnsemble, spec: ProblemSpec) -> None:
    if (ensemble.dim_x != spec.dim_x or ensemble.dim_w != spec.dim_w
            or ensemble.n_atoms != spec.levy.n_atoms):
        raise PreconditionError("ensemble and spec dimensions disagree", {
            "ensemble": [ensemble.dim_x, ensemble.dim_w, ensemble.n_atoms],
            "spec": [spec.dim_x, spec.dim_w, spec.levy.n_atoms],
        })


def _backward(
    ensemble: PathEnsemble,
    spec: ProblemSpec,
    basis: RegressionBasis,
    penalty: float,
    reflected: bool,
    terminal_values: Optional[np.ndarray],
    max_iters: int,
    tol: float,
    damping: float,
) -> BackwardSolution:
    _check_dimensions(ensemble, spec)
    grid = ensemble.grid
    K, dt, M, d = grid.steps, grid.dt, ensemble.n_paths, spec.dim_w
    X, dB, counts, w = ensemble.states, ensemble.brownian_increments, ensemble.jump_counts, ensemble.weights
    has_jumps = spec.levy.n_atoms > 0
    l_vals = spec.l_values
    compensator = dt * float(np.dot(spec.levy.weights, l_vals)) if has_jumps else 0.0
    n_funcs = max(basis.n_functions(spec.dim_x), 1)

    Y = np.empty((M, K + 1))
    Z = np.zeros((M, K + 1, d))
    G = np.zeros((M, K + 1))
    dA = np.zeros((M, K))
    Y_tilde = np.empty((M, K + 1)) if reflected else None
    step_se = np.zeros(K + 1)

    if terminal_values is None:
        Y[:, K] = spec.terminal(X[:, K])
    else:
        Y[:, K] = np.asarray(terminal_values, dtype=float)
    if reflected:
        Y_tilde[:, K] = Y[:, K]
    # Y_K + sum_k (Y_k - C_k); its path average is y0 because every basis spans constants
    pathwise = Y[:, K].copy()

    for k in range(K - 1, -1, -1):
        t = float(grid.nodes[k])
        x, u, y_next = X[:, k], ensemble.controls_used[:, k], Y[:, k + 1]
        fitted, spread = basis.project(x, y_next, w)
        C = fitted[:, 0]
        centered = y_next - C
        stats = [centered[:, None] * dB[:, k] / dt]
        if has_jumps:
            W = counts[:, k] @ l_vals - compensator
            stats.append((centered * W / dt)[:, None])
        mart, _ = basis.project(x, np.hstack(stats), w)
        Zk = mart[:, :d]
        Gk = mart[:, d] if has_jumps else np.zeros(M)

        h = spec.obstacle(t, x)

        def drv(y, t=t, x=x, Zk=Zk, Gk=Gk, u=u):
            return spec.driver(t, x, y, Zk, Gk, u)

        if reflected:
            yt = solve_step(C, drv, h, dt, 0.0, spec.lipschitz_y, max_iters, tol, damping)
            Y_tilde[:, k] = yt
            Y[:, k] = np.minimum(yt, h)
            dA[:, k] = np.maximum(yt - h, 0.0)
        else:
            y = solve_step(C, drv, h, dt, penalty, spec.lipschitz_y, max_iters, tol, damping)
            Y[:, k] = y
            dA[:, k] = dt * penalty * np.maximum(y - h, 0.0)
        pathwise += Y[:, k] - C
        Z[:, k] = Zk
        G[:, k] = Gk
        if not ensemble.is_enumerated:
            step_se[k] = float(spread[0]) * np.sqrt(n_funcs / M)

    A = np.concatenate([np.zeros((M, 1)), np.cumsum(dA, axis=1)], axis=1)
    return BackwardSolution(
        grid=grid,
        Y=Y, Z=Z, Gamma=G, A=A, dA=dA,
        mode=REFLECTED if reflected else PENALIZED,
        penalty=None if reflected else float(penalty),
        y0=float(ensemble.mean(Y[:, 0])),
        y0_stderr=float(ensemble.stderr(pathwise)),
        step_stderr=step_se,
        Y_tilde=Y_tilde,
    )


def solve_penalized(
    ensemble: PathEnsemble,
    spec: ProblemSpec,
    n: float,
    basis: RegressionBasis,
    terminal_values: Optional[np.ndarray] = None,
    max_iters: int = 50,
    tol: float = 1e-12,
    damping: float = 1.0,
) -> BackwardSolution:
    """Penalized BSDE at level n; A accumulates dt n (Y - h)^+."""
    if not (np.isfinite(n) and n >= 0.0):
        raise PreconditionError("penalty level must be finite and >= 0", {"n": n})
    return _backward(ensemble, spec, basis, float(n), False, terminal_values, max_iters, tol, damping)


def solve_reflected(
    ensemble: PathEnsemble,
    spec: ProblemSpec,
    basis: RegressionBasis,
    terminal_values: Optional[np.ndarray] = None,
    max_iters: int = 50,
    tol: float = 1e-12,
    damping: float = 1.0,
) -> BackwardSolution:
    """Reflected BSDE by projection Y = min(Y_tilde, h); the terminal value is not projected."""
    return _backward(ensemble, spec, basis, 0.0, True, terminal_values, max_iters, tol, damping)


@dataclass
class LadderResult:
    levels: List[float]
    solutions: List[BackwardSolution]
    reflected: BackwardSolution
    table: pd.DataFrame
    max_increase: float
    rate_constant: float
    meta: Dict[str, Any] = field(default_factory=dict)

    def to_dict(self) -> Dict[str, Any]:
        return {
            "levels": list(self.levels),
            "y0": [s.y0 for s in self.solutions],
            "y0_reflected": self.reflected.y0,
            "max_increase": self.max_increase,
            "rate_constant": self.rate_constant,
            "table": self.table.to_dict(orient="list"),
        }


def penalization_ladder(
    ensemble: PathEnsemble,
    spec: ProblemSpec,
    levels: Sequence[float],
    basis: RegressionBasis,
    **solver_kwargs: Any,
) -> LadderResult:
    """
    Solve at every penalty level plus the reflected reference, on the same noise.

    max_increase is the largest node-wise Y^{n'} - Y^{n} over consecutive levels;
    rate_constant estimates C in Y^n_0 - Y_0 <= C/n from the largest level.
    """
    levels = [float(n) for n in levels]
    if not levels or any(b <= a for a, b in zip(levels, levels[1:])):
        raise PreconditionError("penalty levels must be non-empty and strictly increasing", {"levels": levels})
    sols = [solve_penalized(ensemble, spec, n, basis, **solver_kwargs) for n in levels]
    refl = solve_reflected(ensemble, spec, basis, **solver_kwargs)

    rows = []
    max_increase = -np.inf
    for i, (n, sol) in enumerate(zip(levels, sols)):
        gap_next = np.nan
        if i + 1 < len(sols):
            diff = sols[i + 1].Y - sol.Y
            gap_next = float(np.max(np.abs(diff)))
            max_increase = max(max_increase, float(np.max(diff)))
        rows.append({
            "n": n,
            "sup_gap_to_reflected": float(np.max(np.abs(sol.Y - refl.Y))),
            "sup_gap_to_next_level": gap_next,
            "mc_stderr": sol.y0_stderr,
            "y0": sol.y0,
        })
    if len(sols) == 1:
        max_increase = 0.0
    rate = levels[-1] * (sols[-1].y0 - refl.y0)
    logger.info("penalization ladder %s: levels=%s y0=%s reflected=%.6g",
                spec.name, levels, [round(s.y0, 8) for s in sols], refl.y0)
    return LadderResult(levels, sols, refl, pd.DataFrame(rows), float(max_increase), float(rate))


def skorokhod_residual(solution: BackwardSolution, ensemble: PathEnsemble, spec: ProblemSpec) -> float:
    """Ensemble mean of sum_k (h(s_k, X_k) - Y_k) dA_k for a reflected solution."""
    if solution.mode != REFLECTED:
        raise PreconditionError("Skorokhod residual needs a reflected solution", {"mode": solution.mode})
    K = solution.grid.steps
    H = np.column_stack([spec.obstacle(float(solution.grid.nodes[k]), ensemble.states[:, k]) for k in range(K)])
    per_path = np.sum((H - solution.Y[:, :K]) * solution.dA, axis=1)
    return float(ensemble.mean(per_path))


def obstacle_excess(solution: BackwardSolution, ensemble: PathEnsemble, spec: ProblemSpec) -> float:
    """max over nodes k < K of Y - h(s_k, X_k)."""
    K = solution.grid.steps
    H = np.column_stack([spec.obstacle(float(solution.grid.nodes[k]), ensemble.states[:, k]) for k in range(K)])
    return float(np.max(solution.Y[:, :K] - H))


def _ordered_data(ensemble: PathEnsemble, spec1: ProblemSpec, spec2: ProblemSpec, seed: int) -> None:
    gen = np.random.default_rng(seed)
    K = ensemble.grid.steps
    for k in range(K + 1):
        t = float(ensemble.grid.nodes[k])
        x = ensemble.states[:, k]
        if k == K:
            if np.any(spec1.terminal(x) > spec2.terminal(x) + 1e-12):
                raise PreconditionError("comparison needs Phi_1 <= Phi_2", {"step": k})
            continue
        u = ensemble.controls_used[:, k]
        if np.any(spec1.obstacle(t, x) > spec2.obstacle(t, x) + 1e-12):
            raise PreconditionError("comparison needs h_1 <= h_2", {"step": k})
        y = gen.normal(size=x.shape[0])
        z = gen.normal(size=(x.shape[0], spec1.dim_w))
        v = gen.normal(size=x.shape[0])
        if np.any(spec1.driver(t, x, y, z, v, u) > spec2.driver(t, x, y, z, v, u) + 1e-12):
            raise PreconditionError("comparison needs f_1 <= f_2", {"step": k})
        same = (np.array_equal(spec1.drift(t, x, u), spec2.drift(t, x, u))
                and np.array_equal(spec1.diffusion(t, x, u), spec2.diffusion(t, x, u))
                and np.array_equal(spec1.jump_sizes(t, x, u), spec2.jump_sizes(t, x, u)))
        if not same:
            raise PreconditionError("compared specs must share b, sigma and gamma", {"step": k})


def comparison_check(
    ensemble: PathEnsemble,
    spec1: ProblemSpec,
    spec2: ProblemSpec,
    basis: RegressionBasis,
    tol: Optional[float] = None,
    n_stderr: float = 3.0,
    seed: int = 0,
    **solver_kwargs: Any,
) -> Dict[str, Any]:
    """
    Reflected solutions of two ordered problems on shared noise.

    Reports the fraction of (path, node) pairs with Y1 > Y2 + tol. By default
    tol is n_stderr combined regression standard errors at each node.
    """
    _ordered_data(ensemble, spec1, spec2, seed)
    s1 = solve_reflected(ensemble, spec1, basis, **solver_kwargs)
    s2 = solve_reflected(ensemble, spec2, basis, **solver_kwargs)
    if tol is None:
        tol_k = n_stderr * np.sqrt(s1.step_stderr ** 2 + s2.step_stderr ** 2) + 1e-12
    else:
        tol_k = np.full(s1.Y.shape[1], float(tol))
    excess = s1.Y - s2.Y
    violations = excess > tol_k[None, :]
    gap = s2.Y - s1.Y
    return {
        "fraction": float(np.mean(violations)),
        "violations": int(np.sum(violations)),
        "max_excess": float(np.max(excess)),
        "max_gap": float(np.max(gap)),
        "y0_1": s1.y0,
        "y0_2": s2.y0,
        "y0_gap": s2.y0 - s1.y0,
        "tolerance_max": float(np.max(tol_k)),
        "solutions": (s1, s2),
    }


def apriori_report(solution: BackwardSolution, ensemble: PathEnsemble) -> Dict[str, float]:
    """Terms of the a-priori estimate, reported (not asserted)."""
    dt = solution.grid.dt
    sup_y2 = np.max(solution.Y ** 2, axis=1)
    z2 = np.sum(solution.Z[:, :-1] ** 2, axis=(1, 2)) * dt
    g2 = np.sum(solution.Gamma[:, :-1] ** 2, axis=1) * dt
    a2 = solution.A[:, -1] ** 2
    total = ensemble.mean(sup_y2) + ensemble.mean(z2) + ensemble.mean(a2)
    scale = 1.0 + float(np.dot(ensemble.x0, ensemble.x0))
    return {
        "sup_Y_squared": float(ensemble.mean(sup_y2)),
        "int_Z_squared": float(ensemble.mean(z2)),
        "int_Gamma_squared": float(ensemble.mean(g2)),
        "A_T_squared": float(ensemble.mean(a2)),
        "total": float(total),
        "ratio_to_initial": float(total / scale),
    }
