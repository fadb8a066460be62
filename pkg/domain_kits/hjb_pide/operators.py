"""
Discrete operators of the HJB PIDE.

The local operator uses central second differences and upwind first
differences; the nonlocal operators are exact sums over the atoms of nu with
W(x + gamma) taken from the surface. Atoms with |e| < delta use the
second-order Taylor form built from the stencil Hessian.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property
from typing import Optional, Sequence, Tuple, Union

import numpy as np
from scipy.interpolate import RegularGridInterpolator

from domain_kits.errors import PreconditionError
from domain_kits.hjb_pide.grid import SpaceGrid
from domain_kits.problem_model.spec import ProblemSpec

Control = Union[int, Sequence[float], np.ndarray]


def default_delta(spec: ProblemSpec) -> float:
    """Half the smallest atom norm, so no atom falls in the small-jump set."""
    if spec.levy.n_atoms == 0:
        return 0.0
    return 0.5 * float(np.min(spec.levy.norms))


def control_point(spec: ProblemSpec, u: Control) -> np.ndarray:
    if isinstance(u, (int, np.integer)):
        if not 0 <= int(u) < spec.n_controls:
            raise PreconditionError("control index out of range", {"index": int(u)})
        return spec.controls[int(u)]
    u = np.asarray(u, dtype=float).reshape(-1)
    if u.shape[0] != spec.dim_u:
        raise PreconditionError("control point has the wrong dimension", {"dim": u.shape[0]})
    return u


def _split(spec: ProblemSpec, delta: Optional[float]) -> np.ndarray:
    d = default_delta(spec) if delta is None else float(delta)
    if d < 0.0:
        raise PreconditionError("delta must be non-negative", {"delta": d})
    return spec.levy.norms >= d


def _pad(d: np.ndarray, axis: int, first: bool) -> np.ndarray:
    edge = np.take(d, [0] if first else [-1], axis=axis)
    return np.concatenate([edge, d] if first else [d, edge], axis=axis)


@dataclass(frozen=True, eq=False)
class Stencil:
    """Finite-difference data of one time slice, flattened to [N, ...]."""

    grid: SpaceGrid
    values: np.ndarray
    grad: np.ndarray
    forward: np.ndarray
    backward: np.ndarray
    hess: np.ndarray

    @classmethod
    def from_values(cls, values: np.ndarray, grid: SpaceGrid) -> "Stencil":
        W = np.asarray(values, dtype=float).reshape(grid.shape)
        hs, n, N = grid.spacing, grid.dim, grid.size
        fwd, bwd, cen = np.empty((N, n)), np.empty((N, n)), np.empty((N, n))
        hess = np.zeros((N, n, n))
        first = []
        for i in range(n):
            d = np.diff(W, axis=i) / hs[i]
            # faces fall back to the only available one-sided difference
            fwd[:, i] = _pad(d, i, first=False).reshape(-1)
            bwd[:, i] = _pad(d, i, first=True).reshape(-1)
            g = np.gradient(W, hs[i], axis=i)
            first.append(g)
            cen[:, i] = g.reshape(-1)
            d2 = np.diff(W, n=2, axis=i) / hs[i] ** 2
            hess[:, i, i] = _pad(_pad(d2, i, first=True), i, first=False).reshape(-1)
        for i in range(n):
            for j in range(i + 1, n):
                cross = np.gradient(first[i], hs[j], axis=j).reshape(-1)
                hess[:, i, j] = cross
                hess[:, j, i] = cross
        return cls(grid, W.reshape(-1), cen, fwd, bwd, hess)

    @cached_property
    def _interp(self) -> RegularGridInterpolator:
        return RegularGridInterpolator(tuple(self.grid.axes), self.values.reshape(self.grid.shape),
                                       method="linear", bounds_error=False, fill_value=None)

    def interpolate(self, x: np.ndarray) -> np.ndarray:
        """W at points [P, n], clamped to the box."""
        return self._interp(self.grid.clamp(np.atleast_2d(x)))

    def flat_index(self, node: Sequence[int]) -> int:
        node = tuple(int(i) for i in node)
        if len(node) != self.grid.dim:
            raise PreconditionError("node index has the wrong dimension", {"node": list(node)})
        if not all(0 < i < p - 1 for i, p in zip(node, self.grid.shape)):
            raise PreconditionError("boundary node has no full stencil", {"node": list(node)})
        return int(np.ravel_multi_index(node, self.grid.shape))


def local_operator(stencil: Stencil, spec: ProblemSpec, t: float, node: Sequence[int], u: Control) -> float:
    """1/2 tr(sigma sigma^T D^2 W) + b . D_upwind W at an interior node."""
    j = stencil.flat_index(node)
    x = stencil.grid.nodes()[j:j + 1]
    up = control_point(spec, u)[None, :]
    b = np.asarray(spec.drift(t, x, up), dtype=float)[0]
    sig = np.asarray(spec.diffusion(t, x, up), dtype=float)[0]
    a = sig @ sig.T
    upwind = np.where(b > 0.0, stencil.forward[j], stencil.backward[j])
    return float(0.5 * np.sum(a * stencil.hess[j]) + b @ upwind)


def _jump_terms(surface, spec, t, x, u, delta):
    x = np.asarray(x, dtype=float).reshape(-1)
    up = control_point(spec, u)
    if spec.levy.n_atoms == 0:
        return None
    gam = spec.jump_sizes(t, x[None, :], up[None, :])[:, 0, :]
    large = _split(spec, delta)
    w0 = surface.interpolate(t, x)
    dest = surface.interpolate(t, x[None, :] + gam)
    grad, hess = surface.derivatives(t, x)
    taylor2 = 0.5 * np.einsum("ai,ij,aj->a", gam, hess, gam)
    return gam, large, w0, dest, grad, taylor2


def nonlocal_B(surface, spec: ProblemSpec, t: float, x: np.ndarray, u: Control,
               delta: Optional[float] = None) -> float:
    """sum_a w_a [W(x+gamma_a) - W(x) - grad W . gamma_a], Taylor form on |e| < delta."""
    terms = _jump_terms(surface, spec, t, x, u, delta)
    if terms is None:
        return 0.0
    gam, large, w0, dest, grad, taylor2 = terms
    integrand = np.where(large, dest - w0 - gam @ grad, taylor2)
    out = float(spec.levy.weights @ integrand)
    if not np.isfinite(out):
        raise PreconditionError("non-finite value in nonlocal_B", {"t": t})
    return out


def nonlocal_C(surface, spec: ProblemSpec, t: float, x: np.ndarray, u: Control,
               delta: Optional[float] = None) -> float:
    """sum_a w_a l(e_a) [W(x+gamma_a) - W(x)], Taylor form on |e| < delta."""
    terms = _jump_terms(surface, spec, t, x, u, delta)
    if terms is None:
        return 0.0
    gam, large, w0, dest, grad, taylor2 = terms
    integrand = np.where(large, dest - w0, gam @ grad + taylor2)
    out = float((spec.levy.weights * spec.l_values) @ integrand)
    if not np.isfinite(out):
        raise PreconditionError("non-finite value in nonlocal_C", {"t": t})
    return out


def hamiltonian(
    spec: ProblemSpec,
    t: float,
    x: np.ndarray,
    W_val: float,
    grad: np.ndarray,
    hess: np.ndarray,
    Bu: float,
    Cu: float,
    u: Control,
    drift_grad: Optional[np.ndarray] = None,
) -> float:
    """L^u W + B^u W + f(t, x, W, grad W . sigma, C^u W, u).

    `drift_grad` replaces `grad` in the b . grad term (an upwind gradient);
    the z argument of f always uses `grad`.
    """
    x = np.asarray(x, dtype=float).reshape(1, -1)
    grad = np.asarray(grad, dtype=float).reshape(-1)
    hess = np.asarray(hess, dtype=float).reshape(grad.shape[0], grad.shape[0])
    dg = grad if drift_grad is None else np.asarray(drift_grad, dtype=float).reshape(-1)
    inputs = np.concatenate([x.ravel(), grad, hess.ravel(), dg, [W_val, Bu, Cu]])
    if not np.all(np.isfinite(inputs)):
        raise PreconditionError("hamiltonian inputs must be finite")
    up = control_point(spec, u)[None, :]
    b = np.asarray(spec.drift(t, x, up), dtype=float)[0]
    sig = np.asarray(spec.diffusion(t, x, up), dtype=float)[0]
    local = 0.5 * float(np.sum((sig @ sig.T) * hess)) + float(b @ dg)
    z = (grad @ sig)[None, :]
    f = float(spec.driver(t, x, np.array([float(W_val)]), z, np.array([float(Cu)]), up)[0])
    return local + float(Bu) + f


@dataclass(frozen=True)
class FieldCoefficients:
    """Per-control coefficients on all nodes, as the march sees them."""

    b_eff: np.ndarray       # [N, n], drift minus the large-atom compensator
    a_eff: np.ndarray       # [N, n, n], sigma sigma^T plus small-atom covariance
    sigma: np.ndarray       # [N, n, d]
    gamma: np.ndarray       # [A, N, n]
    large: np.ndarray       # [A]
    u: np.ndarray           # [N, m]


def field_coefficients(spec: ProblemSpec, t: float, X: np.ndarray, index: int,
                       delta: Optional[float] = None) -> FieldCoefficients:
    N = X.shape[0]
    u = spec.control_batch(index, N)
    b = np.asarray(spec.drift(t, X, u), dtype=float)
    sig = np.asarray(spec.diffusion(t, X, u), dtype=float)
    a = np.einsum("nij,nkj->nik", sig, sig)
    gam = spec.jump_sizes(t, X, u)
    large = _split(spec, delta)
    w = spec.levy.weights
    if gam.shape[0]:
        b = b - np.einsum("a,ani->ni", w * large, gam)
        a = a + np.einsum("a,ani,anj->nij", w * ~large, gam, gam)
    return FieldCoefficients(b, a, sig, gam, large, u)


def hamiltonian_field(spec: ProblemSpec, t: float, stencil: Stencil, index: int,
                      delta: Optional[float] = None,
                      coeffs: Optional[FieldCoefficients] = None) -> np.ndarray:
    """The discrete Hamiltonian at every node for control `index`; shape [N]."""
    X = stencil.grid.nodes()
    c = coeffs if coeffs is not None else field_coefficients(spec, t, X, index, delta)
    W = stencil.values
    upwind = np.where(c.b_eff > 0.0, stencil.forward, stencil.backward)
    H = 0.5 * np.einsum("nij,nij->n", c.a_eff, stencil.hess) + np.sum(c.b_eff * upwind, axis=1)
    Cv = np.zeros_like(W)
    if c.gamma.shape[0]:
        w, l = spec.levy.weights, spec.l_values
        for a in range(c.gamma.shape[0]):
            g = c.gamma[a]
            if c.large[a]:
                jump = stencil.interpolate(X + g) - W
                H = H + w[a] * jump
                Cv = Cv + w[a] * l[a] * jump
            else:
                small = np.sum(stencil.grad * g, axis=1) + 0.5 * np.einsum("ni,nij,nj->n", g, stencil.hess, g)
                Cv = Cv + w[a] * l[a] * small
    z = np.einsum("ni,nij->nj", stencil.grad, c.sigma)
    return H + np.asarray(spec.driver(t, X, W, z, Cv, c.u), dtype=float)


def min_hamiltonian(spec: ProblemSpec, t: float, stencil: Stencil,
                    delta: Optional[float] = None) -> Tuple[np.ndarray, np.ndarray]:
    """Minimum over the control grid and its argmin (lowest index on ties)."""
    fields = np.stack([hamiltonian_field(spec, t, stencil, k, delta) for k in range(spec.n_controls)])
    idx = np.argmin(fields, axis=0)
    return fields[idx, np.arange(fields.shape[1])], idx
