"""
Explicit monotone march for the penalized and obstacle HJB equations.

    W_K = Phi
    What_k = W_{k+1} + dt * min_u H^u(W_{k+1})
    W_k = P_n(What_k)          (penalized: closed-form implicit penalty)
    W_k = min(What_k, h(s_k))  (obstacle: projection)

The scheme is monotone when the CFL number stays below CFL_LIMIT and the
driver does not depend on z; the number is checked before marching.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass
from typing import Optional, Tuple

import numpy as np

from domain_kits.errors import CFLViolationError, IllPosedSpecError, PreconditionError
from domain_kits.forward_sim.grid import TimeGrid
from domain_kits.hjb_pide.grid import SpaceGrid
from domain_kits.hjb_pide.operators import (
    Stencil,
    default_delta,
    field_coefficients,
    min_hamiltonian,
)
from domain_kits.hjb_pide.surface import OBSTACLE, PENALIZED, ValueSurface
from domain_kits.problem_model.spec import ProblemSpec
from domain_kits.rbsde_solver.implicit import penalty_projection

logger = logging.getLogger(__name__)

CFL_LIMIT = 0.95
# coefficients are probed at this many time nodes for the CFL number
CFL_TIME_SAMPLES = 16
# nodes sampled when looking for z-dependence of the driver
Z_SAMPLE_NODES = 8


@dataclass(frozen=True)
class PdeGrids:
    time: TimeGrid
    space: SpaceGrid

    def to_dict(self) -> dict:
        return {"time": self.time.to_dict(), "space": self.space.to_dict()}


def _check_dims(spec: ProblemSpec, grids: PdeGrids) -> None:
    if spec.dim_x not in (1, 2):
        raise PreconditionError("the grid scheme supports state dimension 1 or 2", {"dim_x": spec.dim_x})
    if grids.space.dim != spec.dim_x:
        raise PreconditionError("space grid dimension differs from the state dimension",
                                {"grid": grids.space.dim, "dim_x": spec.dim_x})
    if abs(grids.time.T - spec.horizon) > 1e-12:
        raise PreconditionError("time grid must end at the horizon", {"T": grids.time.T, "horizon": spec.horizon})


def cfl_number(spec: ProblemSpec, grids: PdeGrids, delta: Optional[float] = None) -> float:
    """dt times the largest centre-node rate of the one-step update."""
    d = default_delta(spec) if delta is None else float(delta)
    X = grids.space.nodes()
    hs = grids.space.spacing
    N = X.shape[0]
    w, l = spec.levy.weights, spec.l_values
    K = grids.time.steps
    ks = np.unique(np.linspace(0, K - 1, min(K, CFL_TIME_SAMPLES)).round().astype(int))
    zeros, ones = np.zeros(N), np.ones(N)
    z0 = np.zeros((N, spec.dim_w))
    worst = 0.0
    for k in ks:
        t = float(grids.time.nodes[k])
        for j in range(spec.n_controls):
            c = field_coefficients(spec, t, X, j, d)
            diag = np.einsum("nii->ni", c.a_eff)
            rate = np.sum(diag / hs ** 2, axis=1) + np.sum(np.abs(c.b_eff) / hs, axis=1)
            if spec.dim_x == 2:
                rate = rate + np.abs(c.a_eff[:, 0, 1]) / (hs[0] * hs[1])
            base = spec.driver(t, X, zeros, z0, zeros, c.u)
            f_y = np.abs(spec.driver(t, X, ones, z0, zeros, c.u) - base)
            f_v = np.abs(spec.driver(t, X, zeros, z0, ones, c.u) - base)
            mass = float(w @ c.large)
            lmass = float((w * l) @ c.large)
            rate = rate + mass + f_y + f_v * lmass
            worst = max(worst, float(np.max(rate)))
    return grids.time.dt * worst


def driver_depends_on_z(spec: ProblemSpec, grids: PdeGrids) -> bool:
    """True when the driver moves with z at a few sampled nodes, times and controls."""
    X = grids.space.nodes()
    pick = np.unique(np.linspace(0, X.shape[0] - 1, min(X.shape[0], Z_SAMPLE_NODES)).round().astype(int))
    Xs = X[pick]
    P = Xs.shape[0]
    zeros = np.zeros(P)
    z0, z1 = np.zeros((P, spec.dim_w)), np.ones((P, spec.dim_w))
    for t in (grids.time.t0, 0.5 * (grids.time.t0 + grids.time.T)):
        for j in range(spec.n_controls):
            u = spec.control_batch(j, P)
            base = np.asarray(spec.driver(t, Xs, zeros, z0, zeros, u), dtype=float)
            moved = np.asarray(spec.driver(t, Xs, zeros, z1, zeros, u), dtype=float)
            if np.any(moved != base):
                return True
    return False


def march_step(
    spec: ProblemSpec,
    t: float,
    dt: float,
    stencil: Stencil,
    h: np.ndarray,
    mode: str,
    n: float = 0.0,
    delta: Optional[float] = None,
) -> Tuple[np.ndarray, np.ndarray]:
    """One backward step from the slice in `stencil`; returns (W_k [N], argmin [N])."""
    Hmin, idx = min_hamiltonian(spec, t, stencil, delta)
    raw = stencil.values + dt * Hmin
    if mode == OBSTACLE:
        return np.minimum(raw, h), idx
    return penalty_projection(raw, h, dt, n), idx


def _march(spec: ProblemSpec, grids: PdeGrids, mode: str, n: float,
           delta: Optional[float], check_cfl: bool) -> ValueSurface:
    _check_dims(spec, grids)
    d = default_delta(spec) if delta is None else float(delta)
    cfl = cfl_number(spec, grids, d)
    if check_cfl and cfl > CFL_LIMIT:
        raise CFLViolationError(f"CFL number {cfl:.4g} exceeds {CFL_LIMIT}",
                                {"cfl": cfl, "limit": CFL_LIMIT, **grids.to_dict()})
    if driver_depends_on_z(spec, grids):
        logger.warning("driver depends on z; the march may not be monotone")

    tg, sg = grids.time, grids.space
    X = sg.nodes()
    K = tg.steps
    values = np.empty((K + 1, sg.size))
    values[K] = np.asarray(spec.terminal(X), dtype=float)
    if not np.all(np.isfinite(values[K])):
        raise IllPosedSpecError("terminal condition is not finite on the grid", {"coefficient": "terminal"})
    for k in range(K - 1, -1, -1):
        t = float(tg.nodes[k])
        stencil = Stencil.from_values(values[k + 1], sg)
        h = np.asarray(spec.obstacle(t, X), dtype=float)
        values[k], _ = march_step(spec, t, tg.dt, stencil, h, mode, n, d)
        if not np.all(np.isfinite(values[k])):
            raise IllPosedSpecError("non-finite value in the march", {"step": k, "t": t})
    logger.info("march %s done: %d steps x %d nodes, cfl=%.4g", mode, K, sg.size, cfl)
    return ValueSurface(tg, sg, values, mode=mode, penalty=None if mode == OBSTACLE else float(n),
                        meta={"delta": d, "cfl": cfl})


def solve_penalized_hjb(spec: ProblemSpec, grids: PdeGrids, n: float,
                        delta: Optional[float] = None, check_cfl: bool = True) -> ValueSurface:
    """W^n on the grid; n = 0 drops the penalty."""
    if not (np.isfinite(n) and n >= 0.0):
        raise PreconditionError("penalty level must be finite and >= 0", {"n": n})
    return _march(spec, grids, PENALIZED, float(n), delta, check_cfl)


def solve_obstacle_hjb(spec: ProblemSpec, grids: PdeGrids, delta: Optional[float] = None,
                       check_cfl: bool = True) -> ValueSurface:
    """W on the grid; every slice is projected below h(s_k, .) except the terminal one."""
    return _march(spec, grids, OBSTACLE, 0.0, delta, check_cfl)


def _interior_mask(grid: SpaceGrid) -> np.ndarray:
    idx = np.indices(grid.shape).reshape(grid.dim, -1).T
    return np.all((idx > 0) & (idx < np.array(grid.shape) - 1), axis=1)


def hjb_residual(surface: ValueSurface, spec: ProblemSpec, delta: Optional[float] = None) -> dict:
    """Residual of the discrete equation at interior nodes.

    res_k = (W_{k+1} - W_k)/dt + min_u H(W_{k+1}). Obstacle surfaces must
    satisfy min(h - W_k, res_k) = 0; penalized ones res_k = n (W_k - h)^+.
    """
    d = surface.meta.get("delta", default_delta(spec)) if delta is None else float(delta)
    tg, sg = surface.times, surface.space
    X = sg.nodes()
    inner = _interior_mask(sg)
    worst, worst_abs = np.inf, 0.0
    for k in range(tg.steps):
        t = float(tg.nodes[k])
        Hmin, _ = min_hamiltonian(spec, t, surface.stencil(k + 1), d)
        Wk, Wn = surface.at(k), surface.at(k + 1)
        res = (Wn - Wk) / tg.dt + Hmin
        h = np.asarray(spec.obstacle(t, X), dtype=float)
        if surface.mode == OBSTACLE:
            comp = np.minimum(h - Wk, res)
        else:
            comp = res - surface.penalty * np.maximum(Wk - h, 0.0)
        comp = comp[inner]
        worst = min(worst, float(np.min(comp)))
        worst_abs = max(worst_abs, float(np.max(np.abs(comp))))
    return {"mode": surface.label, "worst": worst, "max_abs": worst_abs,
            "interior_nodes": int(np.sum(inner)), "steps": tg.steps}


def monotonicity_probe(
    spec: ProblemSpec,
    grids: PdeGrids,
    mode: str = OBSTACLE,
    n: float = 0.0,
    delta: Optional[float] = None,
    probes: int = 32,
    seed: int = 0,
    bump: float = 1e-3,
) -> dict:
    """Raise one node of a random slice and check no updated interior node goes down."""
    _check_dims(spec, grids)
    rng = np.random.default_rng(seed)
    tg, sg = grids.time, grids.space
    X = sg.nodes()
    base = np.asarray(spec.terminal(X), dtype=float)
    inner = _interior_mask(sg)
    min_change = np.inf
    for _ in range(int(probes)):
        k = int(rng.integers(0, tg.steps))
        t = float(tg.nodes[k])
        W = base + 0.1 * rng.standard_normal(sg.size)
        j = int(rng.integers(0, sg.size))
        bumped = W.copy()
        bumped[j] += bump
        h = np.asarray(spec.obstacle(t, X), dtype=float)
        u0, _ = march_step(spec, t, tg.dt, Stencil.from_values(W, sg), h, mode, n, delta)
        u1, _ = march_step(spec, t, tg.dt, Stencil.from_values(bumped, sg), h, mode, n, delta)
        min_change = min(min_change, float(np.min((u1 - u0)[inner])))
    return {"probes": int(probes), "min_change": min_change, "ok": bool(min_change >= -1e-12),
            "cfl": cfl_number(spec, grids, delta)}
