"""
Probabilistic value estimates.

The value is an infimum over all adapted controls; here it is taken over the
implemented classes (every constant control, the feedback synthesized from a
surface when one is given, and any extra policies), so it is an upper
estimate of W.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field
from typing import Any, Dict, List, Optional, Sequence, Union

import numpy as np

from domain_kits.errors import PreconditionError
from domain_kits.forward_sim.controls import ControlLaw
from domain_kits.hjb_pide.surface import ValueSurface
from domain_kits.problem_model.spec import ProblemSpec
from domain_kits.rbsde_solver.cost import McConfig, cost_functional

logger = logging.getLogger(__name__)

UPPER_ESTIMATE = "upper estimate of W"


@dataclass(frozen=True)
class ValueEstimate:
    value: float
    stderr: float
    best: Dict[str, Any]
    candidates: List[Dict[str, Any]] = field(default_factory=list)
    mode: str = "reflected"
    obstacle_gap: float = float("inf")
    label: str = UPPER_ESTIMATE

    def to_dict(self) -> Dict[str, Any]:
        return {
            "value": self.value, "stderr": self.stderr, "best": self.best, "mode": self.mode,
            "obstacle_gap": self.obstacle_gap, "label": self.label, "candidates": self.candidates,
        }


def value_mc(
    spec: ProblemSpec,
    t: float,
    x,
    config: McConfig,
    surface: Optional[ValueSurface] = None,
    policies: Sequence[ControlLaw] = (),
    mode: str = "reflected",
    n: Optional[float] = None,
    delta: Optional[float] = None,
) -> ValueEstimate:
    """min over control classes of Y_t (reflected, or penalized with level n).

    All candidates run on the same noise (the config seed), so the minimum is
    taken over coupled estimates.
    """
    laws: List[Union[int, ControlLaw]] = list(range(spec.n_controls))
    if surface is not None:
        from domain_kits.feedback.policy import synthesize
        laws.append(synthesize(surface, spec, delta))
    laws.extend(policies)

    candidates = []
    for law in laws:
        est = cost_functional(spec, t, x, law, config, mode=mode, n=n)
        candidates.append({"control": est.control, "value": est.value, "stderr": est.stderr})
    best = min(range(len(candidates)), key=lambda i: (candidates[i]["value"], i))
    pick = candidates[best]
    x_arr = np.asarray(x, dtype=float).reshape(1, -1)
    h = float(spec.obstacle(float(t), x_arr)[0])
    logger.info("value_mc(%s) at t=%g: %d candidates, best %s = %.6g", mode, t, len(candidates),
                pick["control"].get("kind"), pick["value"])
    return ValueEstimate(value=pick["value"], stderr=pick["stderr"], best=pick["control"],
                         candidates=candidates, mode=mode if mode == "reflected" else f"penalized(n={n:g})",
                         obstacle_gap=h - pick["value"])


def lipschitz_mc(
    spec: ProblemSpec,
    t: float,
    x,
    x_prime,
    config: McConfig,
    control: int = 0,
) -> Dict[str, float]:
    """Coupled estimate of |Y_t(x) - Y_t(x')| / |x - x'| under one control and shared noise."""
    a = np.asarray(x, dtype=float).reshape(-1)
    b = np.asarray(x_prime, dtype=float).reshape(-1)
    gap = float(np.linalg.norm(a - b))
    if gap <= 0.0:
        raise PreconditionError("lipschitz probe needs two distinct starting points")
    one = cost_functional(spec, t, a, control, config)
    two = cost_functional(spec, t, b, control, config)
    sup_sq = one.ensemble.mean(np.max((one.solution.Y - two.solution.Y) ** 2, axis=1))
    return {
        "ratio": abs(one.value - two.value) / gap,
        "sup_stability": float(sup_sq) / gap ** 2,
        "distance": gap,
        "values": [one.value, two.value],
    }
