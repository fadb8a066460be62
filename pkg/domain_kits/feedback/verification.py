"""
Evaluation of a feedback policy and the verification diagnostics.

(a) Z_k against grad W(s_k, X_k) . sigma(s_k, X_k, u_k)
(b) Gamma_k against sum_a w_a l(e_a) [W(s_k, X_k + gamma_a) - W(s_k, X_k)]
(c) |J(t, x; policy) - W(t, x)|

Grid derivatives of the computed surface stand in for the superdifferential;
the check coincides with classical verification when W is smooth.
"""

from __future__ import annotations

from typing import Optional

import numpy as np

from domain_kits.errors import PreconditionError
from domain_kits.forward_sim.ensemble import PathEnsemble
from domain_kits.hjb_pide.surface import ValueSurface
from domain_kits.problem_model.spec import ProblemSpec
from domain_kits.rbsde_solver.cost import CostEstimate, McConfig, cost_functional
from domain_kits.rbsde_solver.solution import BackwardSolution

from .policy import FeedbackPolicy

# below this norm a relative error falls back to the absolute error
SCALE_FLOOR = 1e-12


def evaluate_policy(spec: ProblemSpec, policy: FeedbackPolicy, t: float, x, config: McConfig,
                    mode: str = "reflected", n: Optional[float] = None) -> CostEstimate:
    """J(t, x; policy): simulate under the feedback and solve along it."""
    return cost_functional(spec, t, x, policy, config, mode=mode, n=n)


def _relative(ensemble: PathEnsemble, estimate: np.ndarray, reference: np.ndarray) -> float:
    err = float(np.sqrt(ensemble.mean(np.sum((estimate - reference) ** 2, axis=1))))
    scale = float(np.sqrt(ensemble.mean(np.sum(reference ** 2, axis=1))))
    return err / scale if scale > SCALE_FLOOR else err


def verification_diagnostics(
    spec: ProblemSpec,
    policy: FeedbackPolicy,
    surface: ValueSurface,
    ensemble: PathEnsemble,
    solution: BackwardSolution,
) -> dict:
    """Relative errors (a), (b) pooled over steps 0..K-1, and the value gap (c)."""
    if not (spec.dim_x == surface.space.dim == ensemble.dim_x == policy.space.dim):
        raise PreconditionError("spec, surface, policy and ensemble dimensions disagree", {
            "spec": spec.dim_x, "surface": surface.space.dim,
            "policy": policy.space.dim, "ensemble": ensemble.dim_x,
        })
    if solution.Y.shape != ensemble.states.shape[:2]:
        raise PreconditionError("solution does not belong to the ensemble",
                                {"solution": list(solution.Y.shape), "ensemble": list(ensemble.states.shape[:2])})
    grid = ensemble.grid
    M, K = ensemble.n_paths, grid.steps
    z_est, z_ref, g_est, g_ref = [], [], [], []
    wl = spec.levy.weights * spec.l_values
    for k in range(K):
        t = float(grid.nodes[k])
        X, U = ensemble.states[:, k], ensemble.controls_used[:, k]
        grad, _ = surface.derivatives(t, X)
        sig = np.asarray(spec.diffusion(t, X, U), dtype=float)
        z_ref.append(np.einsum("pi,pij->pj", grad, sig))
        z_est.append(solution.Z[:, k, :])
        agg = np.zeros(M)
        if spec.levy.n_atoms:
            w0 = surface.interpolate(t, X)
            gam = spec.jump_sizes(t, X, U)
            for a in range(gam.shape[0]):
                agg += wl[a] * (surface.interpolate(t, X + gam[a]) - w0)
        g_ref.append(agg[:, None])
        g_est.append(solution.Gamma[:, k][:, None])
    # pool steps per path so weighted means stay per-path
    z_e, z_r = np.concatenate(z_est, axis=1), np.concatenate(z_ref, axis=1)
    g_e, g_r = np.concatenate(g_est, axis=1), np.concatenate(g_ref, axis=1)
    x0 = np.asarray(ensemble.x0, dtype=float).reshape(-1)
    w_surface = surface.interpolate(grid.t0, x0)
    return {
        "z_relative_error": _relative(ensemble, z_e, z_r),
        "gamma_relative_error": _relative(ensemble, g_e, g_r),
        "value_gap": abs(solution.y0 - w_surface),
        "policy_value": solution.y0,
        "policy_stderr": solution.y0_stderr,
        "surface_value": w_surface,
        "steps": K,
        "paths": M,
    }
