"""
Registry of parametric coefficient families.

Configs never carry closures: they name a family and give its parameters.
Each family validates its parameters with a pydantic model that rejects
unknown keys and non-finite numbers, then builds vectorized coefficients.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Any, Callable, Dict, Optional, Sequence, Type

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, ValidationError

from domain_kits.errors import ConfigError, IllPosedSpecError
from domain_kits.problem_model.levy import JumpWeight, LevyMeasure
from domain_kits.problem_model.spec import ProblemSpec


class FamilyParams(BaseModel):
    model_config = ConfigDict(extra="forbid", allow_inf_nan=False)


class ZeroParams(FamilyParams):
    """No dynamics; constant driver, terminal value and obstacle."""

    dim: int = Field(1, ge=1, le=8)
    f_const: float = 0.0
    phi_const: float = 0.0
    h_const: float = 1.0


class LQ1DParams(FamilyParams):
    """One-dimensional linear dynamics with a quadratic cost.

    b = a x + b0 + beta u, sigma = sigma0 + sigma_u u, gamma = (jump_c + jump_x x) e,
    f = f0 + fx x + fy y + fz z + fv v + ru u^2 + fux u x,
    Phi = phi0 + phi1 x + phi2 x^2, h = h0 + h1 x + h2 x^2 + ht (T - t).
    """

    a: float = 0.0
    b0: float = 0.0
    beta: float = 0.0
    sigma0: float = 0.0
    sigma_u: float = 0.0
    jump_c: float = 0.0
    jump_x: float = 0.0
    f0: float = 0.0
    fx: float = 0.0
    fy: float = 0.0
    fz: float = 0.0
    fv: float = 0.0
    ru: float = 0.0
    fux: float = 0.0
    phi0: float = 0.0
    phi1: float = 0.0
    phi2: float = 0.0
    h0: float = 1.0e6
    h1: float = 0.0
    h2: float = 0.0
    ht: float = 0.0


class TrigParams(FamilyParams):
    """Bounded smooth coefficients in any dimension (d = n, scalar control)."""

    dim: int = Field(1, ge=1, le=8)
    a: float = 0.5
    beta: float = 1.0
    sigma0: float = 0.3
    s1: float = 0.5
    jump_c: float = 0.2
    jump_s: float = 0.5
    f0: float = 0.0
    q: float = 1.0
    ru: float = 0.5
    fux: float = 0.0
    fy: float = 0.0
    fz: float = 0.0
    fv: float = 0.0
    phi0: float = 0.0
    phi: float = 1.0
    h0: float = 2.0
    h1: float = 0.0
    ht: float = 0.0


class BSJumpParams(FamilyParams):
    """Geometric dynamics with multiplicative jumps x -> x exp(e)."""

    mu: float = 0.0
    beta: float = 0.0
    sigma0: float = 0.2
    r: float = 0.0
    ru: float = 0.0
    f0: float = 0.0
    strike: float = 1.0
    h_gap: float = 0.5
    ht: float = 0.0


@dataclass(frozen=True)
class FamilyDef:
    name: str
    description: str
    params_model: Type[FamilyParams]
    build: Callable[..., ProblemSpec]


def _col(x: np.ndarray) -> np.ndarray:
    return np.asarray(x, dtype=float)[:, 0]


def _build_zero(p: ZeroParams, *, horizon, levy, jump_weight, controls, name) -> ProblemSpec:
    n = p.dim

    def drift(t, x, u):
        return np.zeros_like(x, dtype=float)

    def diffusion(t, x, u):
        return np.zeros(x.shape + (n,))

    def jump(t, x, u, e):
        return np.zeros_like(x, dtype=float)

    def driver(t, x, y, z, v, u):
        return np.full(np.shape(y), p.f_const, dtype=float)

    def terminal(x):
        return np.full(x.shape[0], p.phi_const, dtype=float)

    def obstacle(t, x):
        return np.full(x.shape[0], p.h_const, dtype=float)

    return ProblemSpec(
        dim_x=n, dim_w=n, horizon=horizon, drift=drift, diffusion=diffusion, jump=jump,
        driver=driver, terminal=terminal, obstacle=obstacle, levy=levy,
        jump_weight=jump_weight, controls=controls, name=name, family="zero",
        params=p.model_dump(), lipschitz_y=0.0,
    )


def _build_lq1d(p: LQ1DParams, *, horizon, levy, jump_weight, controls, name) -> ProblemSpec:
    if levy.mark_dim != 1:
        raise IllPosedSpecError("lq1d expects scalar marks", {"mark_dim": levy.mark_dim})
    T = float(horizon)

    def drift(t, x, u):
        return (p.a * _col(x) + p.b0 + p.beta * _col(u))[:, None]

    def diffusion(t, x, u):
        sig = p.sigma0 + p.sigma_u * _col(u)
        return np.broadcast_to(sig, (x.shape[0],)).reshape(-1, 1, 1).astype(float)

    def jump(t, x, u, e):
        return ((p.jump_c + p.jump_x * _col(x)) * float(e[0]))[:, None]

    def driver(t, x, y, z, v, u):
        xs, us = _col(x), _col(u)
        return (p.f0 + p.fx * xs + p.fy * y + p.fz * z[:, 0] + p.fv * v
                + p.ru * us ** 2 + p.fux * us * xs)

    def terminal(x):
        xs = _col(x)
        return p.phi0 + p.phi1 * xs + p.phi2 * xs ** 2

    def obstacle(t, x):
        xs = _col(x)
        return p.h0 + p.h1 * xs + p.h2 * xs ** 2 + p.ht * (T - t)

    return ProblemSpec(
        dim_x=1, dim_w=1, horizon=T, drift=drift, diffusion=diffusion, jump=jump,
        driver=driver, terminal=terminal, obstacle=obstacle, levy=levy,
        jump_weight=jump_weight, controls=controls, name=name, family="lq1d",
        params=p.model_dump(), lipschitz_y=abs(p.fy),
    )


def _build_trig(p: TrigParams, *, horizon, levy, jump_weight, controls, name) -> ProblemSpec:
    n = p.dim
    if levy.mark_dim not in (1, n):
        raise IllPosedSpecError("trig marks must be scalar or match the state dimension",
                                {"mark_dim": levy.mark_dim, "dim": n})
    T = float(horizon)
    eye = np.eye(n)

    def drift(t, x, u):
        return p.beta * u[:, :1] - p.a * np.sin(x)

    def diffusion(t, x, u):
        return (p.sigma0 * (1.0 + p.s1 * np.cos(x)))[:, :, None] * eye

    def jump(t, x, u, e):
        mark = np.broadcast_to(np.asarray(e, dtype=float), (n,))
        return p.jump_c * (1.0 + p.jump_s * np.sin(x)) * mark

    def driver(t, x, y, z, v, u):
        us = u[:, 0]
        return (p.f0 + p.q * np.mean(np.cos(x), axis=1) + p.ru * us ** 2
                + p.fux * us * np.mean(np.sin(x), axis=1)
                + p.fy * y + p.fz * np.sum(z, axis=1) + p.fv * v)

    def terminal(x):
        return p.phi0 + p.phi * np.mean(np.cos(x), axis=1)

    def obstacle(t, x):
        return p.h0 + p.h1 * np.mean(np.sin(x), axis=1) + p.ht * (T - t)

    return ProblemSpec(
        dim_x=n, dim_w=n, horizon=T, drift=drift, diffusion=diffusion, jump=jump,
        driver=driver, terminal=terminal, obstacle=obstacle, levy=levy,
        jump_weight=jump_weight, controls=controls, name=name, family="trig",
        params=p.model_dump(), lipschitz_y=abs(p.fy),
    )


def _build_bs_jump(p: BSJumpParams, *, horizon, levy, jump_weight, controls, name) -> ProblemSpec:
    if levy.mark_dim != 1:
        raise IllPosedSpecError("bs-jump expects scalar marks", {"mark_dim": levy.mark_dim})
    T = float(horizon)

    def drift(t, x, u):
        return ((p.mu + p.beta * _col(u)) * _col(x))[:, None]

    def diffusion(t, x, u):
        return (p.sigma0 * _col(x)).reshape(-1, 1, 1)

    def jump(t, x, u, e):
        return (_col(x) * np.expm1(float(e[0])))[:, None]

    def driver(t, x, y, z, v, u):
        return p.f0 - p.r * y + p.ru * _col(u) ** 2

    def terminal(x):
        return np.maximum(_col(x) - p.strike, 0.0)

    def obstacle(t, x):
        return np.maximum(_col(x) - p.strike, 0.0) + p.h_gap + p.ht * (T - t)

    return ProblemSpec(
        dim_x=1, dim_w=1, horizon=T, drift=drift, diffusion=diffusion, jump=jump,
        driver=driver, terminal=terminal, obstacle=obstacle, levy=levy,
        jump_weight=jump_weight, controls=controls, name=name, family="bs-jump",
        params=p.model_dump(), lipschitz_y=abs(p.r),
    )


FAMILIES: Dict[str, FamilyDef] = {
    "zero": FamilyDef("zero", "no dynamics, constant data", ZeroParams, _build_zero),
    "lq1d": FamilyDef("lq1d", "1-D linear dynamics, quadratic cost", LQ1DParams, _build_lq1d),
    "trig": FamilyDef("trig", "bounded smooth coefficients, any dimension", TrigParams, _build_trig),
    "bs-jump": FamilyDef("bs-jump", "geometric dynamics with multiplicative jumps", BSJumpParams, _build_bs_jump),
}


def build_problem(
    family: str,
    params: Optional[Dict[str, Any]] = None,
    *,
    horizon: float = 1.0,
    levy: Optional[LevyMeasure] = None,
    jump_weight: Optional[JumpWeight] = None,
    controls: Optional[Sequence] = None,
    name: Optional[str] = None,
) -> ProblemSpec:
    """Build a ProblemSpec from a family name and its parameters."""
    fam = FAMILIES.get(family)
    if fam is None:
        raise ConfigError(f"unknown problem family: {family!r}", {"known": sorted(FAMILIES)})
    try:
        parsed = fam.params_model(**(params or {}))
    except ValidationError as exc:
        raise ConfigError(f"invalid parameters for family {family!r}",
                          {"errors": [e["msg"] for e in exc.errors()]}) from exc
    return fam.build(
        parsed,
        horizon=horizon,
        levy=levy if levy is not None else LevyMeasure.empty(),
        jump_weight=jump_weight if jump_weight is not None else JumpWeight.zero(),
        controls=np.asarray(controls if controls is not None else [[0.0]], dtype=float),
        name=name or family,
    )
