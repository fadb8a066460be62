"""
ProblemSpec: the full description of a reflected recursive control problem.

Coefficients are vectorized over a batch of P states:

    drift(t, x[P,n], u[P,m])           -> [P,n]
    diffusion(t, x, u)                 -> [P,n,d]
    jump(t, x, u, e[l])                -> [P,n]
    driver(t, x, y[P], z[P,d], v[P], u) -> [P]
    terminal(x)                        -> [P]
    obstacle(t, x)                     -> [P]

t is always a scalar time. A ProblemSpec is immutable and safe to share.
"""

from __future__ import annotations

import dataclasses
from dataclasses import dataclass, field
from functools import cached_property
from typing import Any, Callable, Dict, Optional

import numpy as np

from domain_kits.errors import IllPosedSpecError
from domain_kits.problem_model.levy import JumpWeight, LevyMeasure

Coefficient = Callable[..., np.ndarray]


@dataclass(frozen=True, eq=False)
class ProblemSpec:
    dim_x: int
    dim_w: int
    horizon: float
    drift: Coefficient
    diffusion: Coefficient
    jump: Coefficient
    driver: Coefficient
    terminal: Coefficient
    obstacle: Coefficient
    levy: LevyMeasure
    jump_weight: JumpWeight
    controls: np.ndarray
    name: str = "custom"
    family: Optional[str] = None
    params: Dict[str, Any] = field(default_factory=dict)
    # Lipschitz constant of the driver in y, used to decide whether the
    # implicit backward step contracts.
    lipschitz_y: float = 0.0

    def __post_init__(self):
        if int(self.dim_x) < 1 or int(self.dim_w) < 1:
            raise IllPosedSpecError("state and Brownian dimensions must be >= 1",
                                    {"dim_x": self.dim_x, "dim_w": self.dim_w})
        if not (np.isfinite(self.horizon) and self.horizon > 0.0):
            raise IllPosedSpecError("horizon T must be positive and finite", {"horizon": self.horizon})
        controls = np.asarray(self.controls, dtype=float)
        if controls.ndim == 1:
            controls = controls[:, None]
        if controls.ndim != 2 or controls.shape[0] == 0:
            raise IllPosedSpecError("control grid must be a non-empty list of points")
        if not np.all(np.isfinite(controls)):
            raise IllPosedSpecError("control grid contains non-finite points")
        controls.setflags(write=False)
        object.__setattr__(self, "controls", controls)
        object.__setattr__(self, "horizon", float(self.horizon))
        object.__setattr__(self, "lipschitz_y", float(self.lipschitz_y))
        self.jump_weight.check(self.levy)

    @property
    def dim_u(self) -> int:
        return int(self.controls.shape[1])

    @property
    def n_controls(self) -> int:
        return int(self.controls.shape[0])

    @cached_property
    def l_values(self) -> np.ndarray:
        """l(e_a) for every atom."""
        return self.jump_weight.values(self.levy)

    def control_batch(self, index: int, size: int) -> np.ndarray:
        """Control point `index` repeated for a batch of `size` states."""
        return np.broadcast_to(self.controls[int(index)], (int(size), self.dim_u))

    def jump_sizes(self, t: float, x: np.ndarray, u: np.ndarray) -> np.ndarray:
        """gamma(t, x, u, e_a) for every atom; shape [atoms, P, n]."""
        if self.levy.n_atoms == 0:
            return np.zeros((0,) + np.shape(x))
        return np.stack([np.asarray(self.jump(t, x, u, e), dtype=float) for e in self.levy.marks])

    def with_updates(self, **changes: Any) -> "ProblemSpec":
        return dataclasses.replace(self, **changes)

    def describe(self) -> Dict[str, Any]:
        return {
            "name": self.name,
            "family": self.family,
            "params": dict(self.params),
            "dim_x": self.dim_x,
            "dim_w": self.dim_w,
            "horizon": self.horizon,
            "controls": self.controls.tolist(),
            "levy": self.levy.to_dict(),
            "jump_weight": {"kappa": self.jump_weight.kappa, "label": self.jump_weight.label},
        }
