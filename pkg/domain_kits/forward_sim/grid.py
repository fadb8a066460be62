"""Uniform time grids t0 = s_0 < s_1 < ... < s_K = T."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from domain_kits.errors import PreconditionError


@dataclass(frozen=True)
class TimeGrid:
    t0: float
    T: float
    steps: int
    nodes: np.ndarray = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        if int(self.steps) < 1:
            raise PreconditionError("time grid needs at least one step", {"steps": self.steps})
        if not (np.isfinite(self.t0) and np.isfinite(self.T) and self.t0 < self.T):
            raise PreconditionError("time grid needs finite t0 < T", {"t0": self.t0, "T": self.T})
        object.__setattr__(self, "t0", float(self.t0))
        object.__setattr__(self, "T", float(self.T))
        object.__setattr__(self, "steps", int(self.steps))
        nodes = self.t0 + self.dt * np.arange(self.steps + 1)
        nodes[-1] = self.T
        nodes.setflags(write=False)
        object.__setattr__(self, "nodes", nodes)

    @property
    def dt(self) -> float:
        return (self.T - self.t0) / self.steps

    def to_dict(self) -> dict:
        return {"t0": self.t0, "T": self.T, "steps": self.steps}
