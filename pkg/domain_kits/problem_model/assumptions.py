"""
Sampled assumption checks for a ProblemSpec.

These are probabilistic spot checks on a box, not proofs. Each check reports
pass/fail plus the estimated constant; the gate checks (obstacle
compatibility, monotonicity of f in v, the jump-weight bound) decide whether
a problem may be run at all.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field
from typing import Any, Dict, List, Optional, Tuple

import numpy as np

from domain_kits.errors import AssumptionError, IllPosedSpecError, PreconditionError
from domain_kits.problem_model.spec import ProblemSpec

logger = logging.getLogger(__name__)

GATE_CHECKS = ("obstacle_compatibility", "driver_monotone_in_v", "jump_weight_bound")

_TOL = 1e-12


@dataclass(frozen=True)
class AssumptionCheck:
    name: str
    ok: bool
    message: str
    estimate: Optional[float] = None

    def __post_init__(self):
        object.__setattr__(self, "ok", bool(self.ok))
        if self.estimate is not None:
            object.__setattr__(self, "estimate", float(self.estimate))


@dataclass(frozen=True)
class ValidationReport:
    checks: List[AssumptionCheck]
    probes: int
    seed: int
    box: Tuple[float, float]
    constants: Dict[str, float] = field(default_factory=dict)

    @property
    def passed(self) -> bool:
        return all(c.ok for c in self.checks)

    def get(self, name: str) -> AssumptionCheck:
        for c in self.checks:
            if c.name == name:
                return c
        raise KeyError(name)

    def raise_for_gate(self) -> None:
        """Raise AssumptionError on the first failed gate check."""
        for c in self.checks:
            if c.name in GATE_CHECKS and not c.ok:
                raise AssumptionError(c.message, {"check": c.name, "estimate": c.estimate})

    def to_dict(self) -> Dict[str, Any]:
        return {
            "passed": self.passed,
            "probes": self.probes,
            "seed": self.seed,
            "box": list(self.box),
            "constants": dict(self.constants),
            "checks": [
                {"name": c.name, "ok": c.ok, "message": c.message, "estimate": c.estimate}
                for c in self.checks
            ],
        }


def _finite(name: str, arr: np.ndarray) -> np.ndarray:
    arr = np.asarray(arr, dtype=float)
    if not np.all(np.isfinite(arr)):
        flat = arr.reshape(arr.shape[0], -1) if arr.ndim > 1 else arr[:, None]
        probe = int(np.where(~np.all(np.isfinite(flat), axis=1))[0][0])
        raise IllPosedSpecError(f"{name} returned a non-finite value", {"coefficient": name, "probe": probe})
    return arr


def _ratio(num: np.ndarray, den: np.ndarray) -> float:
    mask = den > _TOL
    if not np.any(mask):
        return 0.0
    return float(np.max(num[mask] / den[mask]))


def validate_assumptions(
    spec: ProblemSpec,
    probes: int = 256,
    seed: int = 0,
    box: Tuple[float, float] = (-5.0, 5.0),
) -> ValidationReport:
    """Probe the coefficients of `spec` at `probes` random points of box^n x [0,T].

    Deterministic given `seed`. Raises IllPosedSpecError if any coefficient is
    non-finite at a probe.
    """
    if int(probes) < 1:
        raise PreconditionError("probes must be >= 1", {"probes": probes})
    lo, hi = float(box[0]), float(box[1])
    if not lo < hi:
        raise PreconditionError("probe box must satisfy lo < hi", {"box": [lo, hi]})

    P, n, d, T = int(probes), spec.dim_x, spec.dim_w, spec.horizon
    rng = np.random.default_rng(seed)
    ts = rng.uniform(0.0, T, size=P)
    x0 = rng.uniform(lo, hi, size=(P, n))
    x1 = rng.uniform(lo, hi, size=(P, n))
    ys = rng.normal(size=(P, 2))
    zs = rng.normal(size=(P, 2, d))
    vs = rng.normal(size=(P, 2))
    dv = rng.uniform(0.0, 1.0, size=P) + 1e-3
    cidx = np.arange(P) % spec.n_controls
    us = spec.controls[cidx]

    dx = np.linalg.norm(x0 - x1, axis=1)
    # Evaluate per probe time; coefficients take a scalar t.
    b0 = np.empty((P, n)); b1 = np.empty((P, n))
    s0 = np.empty((P, n, d)); s1 = np.empty((P, n, d))
    f_base = np.empty(P); f_y = np.empty(P); f_z = np.empty(P); f_v = np.empty(P)
    f_vplus = np.empty(P); f_x1 = np.empty(P)
    h_t = np.empty(P)
    gam_ratio = 0.0
    norms = spec.levy.norms
    for p in range(P):
        t = float(ts[p])
        xa, xb, u = x0[p:p + 1], x1[p:p + 1], us[p:p + 1]
        b0[p] = _finite("drift", spec.drift(t, xa, u))[0]
        b1[p] = _finite("drift", spec.drift(t, xb, u))[0]
        s0[p] = _finite("diffusion", spec.diffusion(t, xa, u))[0]
        s1[p] = _finite("diffusion", spec.diffusion(t, xb, u))[0]
        y_a, y_b = ys[p, :1], ys[p, 1:]
        z_a, z_b = zs[p, :1], zs[p, 1:]
        v_a, v_b = vs[p, :1], vs[p, 1:]
        f_base[p] = _finite("driver", spec.driver(t, xa, y_a, z_a, v_a, u))[0]
        f_y[p] = _finite("driver", spec.driver(t, xa, y_b, z_a, v_a, u))[0]
        f_z[p] = _finite("driver", spec.driver(t, xa, y_a, z_b, v_a, u))[0]
        f_v[p] = _finite("driver", spec.driver(t, xa, y_a, z_a, v_b, u))[0]
        f_vplus[p] = _finite("driver", spec.driver(t, xa, y_a, z_a, v_a + dv[p], u))[0]
        f_x1[p] = _finite("driver", spec.driver(t, xb, y_a, z_a, v_a, u))[0]
        h_t[p] = _finite("obstacle", spec.obstacle(t, xa))[0]
        if spec.levy.n_atoms and dx[p] > _TOL:
            for a, e in enumerate(spec.levy.marks):
                g0 = _finite("jump", spec.jump(t, xa, u, e))[0]
                g1 = _finite("jump", spec.jump(t, xb, u, e))[0]
                r = np.linalg.norm(g0 - g1) / (min(1.0, norms[a]) * dx[p])
                gam_ratio = max(gam_ratio, float(r))

    l_b = _ratio(np.linalg.norm(b0 - b1, axis=1), dx)
    l_sig = _ratio(np.linalg.norm((s0 - s1).reshape(P, -1), axis=1), dx)
    l_y = _ratio(np.abs(f_base - f_y), np.abs(ys[:, 0] - ys[:, 1]))
    l_z = _ratio(np.abs(f_base - f_z), np.linalg.norm(zs[:, 0] - zs[:, 1], axis=1))
    l_v = _ratio(np.abs(f_base - f_v), np.abs(vs[:, 0] - vs[:, 1]))
    l_fx = _ratio(np.abs(f_base - f_x1), dx)
    min_dv = float(np.min((f_vplus - f_base) / dv))

    phi = np.concatenate([_finite("terminal", spec.terminal(x0)), _finite("terminal", spec.terminal(x1))])
    h_T = np.concatenate([_finite("obstacle", spec.obstacle(T, x0)), _finite("obstacle", spec.obstacle(T, x1))])
    excess = float(np.max(phi - h_T))
    l_phi = _ratio(np.abs(phi[:P] - phi[P:]), dx)
    # time-T obstacle at x1 vs x0 gives an x-Lipschitz estimate of h
    l_h = _ratio(np.abs(h_T[:P] - h_T[P:]), dx)

    l_vals = spec.l_values
    cap = spec.jump_weight.kappa * np.minimum(1.0, norms)
    weight_ok = bool(np.all((l_vals >= 0.0) & (l_vals <= cap + 1e-15)))
    feeding = int(np.sum(l_vals > 0.0))

    checks = [
        AssumptionCheck("drift_lipschitz_x", np.isfinite(l_b), f"L_b ~ {l_b:.6g}", l_b),
        AssumptionCheck("diffusion_lipschitz_x", np.isfinite(l_sig), f"L_sigma ~ {l_sig:.6g}", l_sig),
        AssumptionCheck("jump_lipschitz_ratio", np.isfinite(gam_ratio),
                        f"max |gamma(x0)-gamma(x1)|/((1^|e|)|x0-x1|) ~ {gam_ratio:.6g}", gam_ratio),
        AssumptionCheck("driver_lipschitz_y", np.isfinite(l_y), f"L_y ~ {l_y:.6g}", l_y),
        AssumptionCheck("driver_lipschitz_z", np.isfinite(l_z), f"L_z ~ {l_z:.6g}", l_z),
        AssumptionCheck("driver_lipschitz_v", np.isfinite(l_v), f"L_v ~ {l_v:.6g}", l_v),
        AssumptionCheck("driver_lipschitz_x", np.isfinite(l_fx), f"L_fx ~ {l_fx:.6g}", l_fx),
        AssumptionCheck("terminal_lipschitz_x", np.isfinite(l_phi), f"L_phi ~ {l_phi:.6g}", l_phi),
        AssumptionCheck("obstacle_lipschitz_x", np.isfinite(l_h), f"L_h ~ {l_h:.6g}", l_h),
        AssumptionCheck(
            "driver_monotone_in_v", min_dv >= -_TOL,
            "v -> f is non-decreasing" if min_dv >= -_TOL else f"f decreases in v (slope {min_dv:.6g})",
            min_dv,
        ),
        AssumptionCheck(
            "obstacle_compatibility", excess <= _TOL,
            "Phi(x) <= h(T,x) at all probes" if excess <= _TOL
            else f"Phi(x) > h(T,x) at a probe (excess {excess:.6g})",
            excess,
        ),
        AssumptionCheck(
            "jump_weight_bound", weight_ok,
            f"0 <= l(e) <= kappa*min(1,|e|) on all atoms; {feeding} of {spec.levy.n_atoms} feed the driver",
            float(np.max(l_vals - cap)) if spec.levy.n_atoms else 0.0,
        ),
        AssumptionCheck(
            "finite_levy_mass", np.isfinite(spec.levy.total_mass),
            f"nu(E) = {spec.levy.total_mass:.6g}", spec.levy.total_mass,
        ),
    ]
    constants = {
        "L_b": l_b, "L_sigma": l_sig, "L_gamma": gam_ratio, "L_y": l_y, "L_z": l_z,
        "L_v": l_v, "L_fx": l_fx, "L_phi": l_phi, "L_h": l_h, "nu_mass": spec.levy.total_mass,
    }
    report = ValidationReport(checks=checks, probes=P, seed=int(seed), box=(lo, hi), constants=constants)
    if not report.passed:
        logger.warning("assumption checks failed for %s: %s", spec.name,
                       [c.name for c in checks if not c.ok])
    return report
