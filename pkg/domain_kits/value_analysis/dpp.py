"""Dynamic programming residual |W(t,x) - min_u G_{t,t+dt}[W(t+dt, X_{t+dt})]|."""

from __future__ import annotations

from typing import Any, Dict, Optional

import numpy as np

from domain_kits.errors import PreconditionError
from domain_kits.hjb_pide.surface import ValueSurface
from domain_kits.problem_model.spec import ProblemSpec
from domain_kits.rbsde_solver.cost import McConfig, cost_functional


def dpp_check(spec: ProblemSpec, surface: ValueSurface, t: float, x, delta_t: float,
              config: McConfig) -> Dict[str, Any]:
    """Backward semigroup over [t, t + delta_t] with terminal data read off the surface."""
    end = float(t) + float(delta_t)
    if delta_t <= 0.0 or end > spec.horizon + 1e-12:
        raise PreconditionError("need 0 < delta_t and t + delta_t <= T",
                                {"t": t, "delta_t": delta_t, "T": spec.horizon})
    end = min(end, spec.horizon)
    x_arr = np.asarray(x, dtype=float).reshape(-1)
    def eta(X):
        return surface.interpolate(end, X)

    semigroup = []
    for j in range(spec.n_controls):
        est = cost_functional(spec, t, x_arr, j, config, until=end, terminal=eta)
        semigroup.append({"index": j, "value": est.value, "stderr": est.stderr})
    best = min(semigroup, key=lambda s: (s["value"], s["index"]))
    w = surface.interpolate(float(t), x_arr)
    return {
        "residual": abs(w - best["value"]),
        "surface_value": w,
        "semigroup_value": best["value"],
        "stderr": best["stderr"],
        "delta_t": float(delta_t),
        "semigroup": semigroup,
    }


def dpp_residual(spec: ProblemSpec, surface: ValueSurface, t: float, x, delta_t: float,
                 config: McConfig) -> float:
    return float(dpp_check(spec, surface, t, x, delta_t, config)["residual"])
