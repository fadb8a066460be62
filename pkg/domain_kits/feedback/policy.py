"""
Feedback policies read off a value surface.

At every (time node, space node) the policy stores the control index that
minimizes the discrete Hamiltonian; lookups go to the nearest node, ties to
the lower index.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass
from typing import Optional

import numpy as np
import pandas as pd

from domain_kits.errors import PreconditionError
from domain_kits.forward_sim.controls import ControlLaw
from domain_kits.forward_sim.grid import TimeGrid
from domain_kits.hjb_pide.grid import SpaceGrid
from domain_kits.hjb_pide.operators import min_hamiltonian
from domain_kits.hjb_pide.surface import ValueSurface
from domain_kits.problem_model.spec import ProblemSpec

logger = logging.getLogger(__name__)


@dataclass(frozen=True, eq=False)
class FeedbackPolicy(ControlLaw):
    times: TimeGrid
    space: SpaceGrid
    table: np.ndarray
    n_controls: int
    source: str = "surface"
    label = "feedback-policy"

    def __post_init__(self):
        table = np.asarray(self.table, dtype=np.int64).reshape(self.times.steps + 1, self.space.size)
        if table.size and (table.min() < 0 or table.max() >= self.n_controls):
            raise PreconditionError("policy holds an index outside the control grid",
                                    {"min": int(table.min()), "max": int(table.max()), "n_controls": self.n_controls})
        table.setflags(write=False)
        object.__setattr__(self, "table", table)

    def time_index(self, t: float) -> int:
        r = (float(t) - self.times.t0) / self.times.dt
        return int(np.clip(np.ceil(r - 0.5), 0, self.times.steps))

    def lookup(self, t: float, x: np.ndarray) -> np.ndarray:
        """Control indices for states x[P, n] at time t."""
        x = np.atleast_2d(np.asarray(x, dtype=float))
        nodes = self.space.nearest_index(x)
        flat = np.ravel_multi_index(tuple(nodes.T), self.space.shape)
        return self.table[self.time_index(t), flat].copy()

    def indices(self, k, t, x):
        return self.lookup(t, x)

    def describe(self) -> dict:
        counts = np.bincount(self.table.reshape(-1), minlength=self.n_controls)
        return {"kind": self.label, "source": self.source, "usage": counts.tolist()}

    def to_frame(self) -> pd.DataFrame:
        X = self.space.nodes()
        K1, N = self.times.steps + 1, self.space.size
        data = {"t": np.repeat(np.asarray(self.times.nodes), N)}
        for i in range(self.space.dim):
            data[f"x_{i}"] = np.tile(X[:, i], K1)
        data["control_index"] = self.table.reshape(-1)
        return pd.DataFrame(data)


def argmin_controls(fields: np.ndarray) -> np.ndarray:
    """Row index of the minimum per column; the lowest index wins ties."""
    return np.argmin(np.asarray(fields, dtype=float), axis=0)


def _copy_faces(idx: np.ndarray, shape) -> np.ndarray:
    grid = idx.reshape(shape).copy()
    for axis in range(len(shape)):
        head = [slice(None)] * len(shape)
        src = list(head)
        head[axis], src[axis] = 0, 1
        grid[tuple(head)] = grid[tuple(src)]
        head[axis], src[axis] = -1, -2
        grid[tuple(head)] = grid[tuple(src)]
    return grid.reshape(-1)


def synthesize(surface: ValueSurface, spec: ProblemSpec, delta: Optional[float] = None) -> FeedbackPolicy:
    """argmin over the control grid of the Hamiltonian built from W(s_k, .)."""
    if surface.space.dim != spec.dim_x:
        raise PreconditionError("surface and spec dimensions disagree",
                                {"surface": surface.space.dim, "dim_x": spec.dim_x})
    d = surface.meta.get("delta") if delta is None else delta
    tg = surface.times
    table = np.empty((tg.steps + 1, surface.space.size), dtype=np.int64)
    for k in range(tg.steps):
        _, idx = min_hamiltonian(spec, float(tg.nodes[k]), surface.stencil(k), d)
        table[k] = _copy_faces(idx, surface.space.shape)
    table[tg.steps] = table[tg.steps - 1]
    logger.info("synthesized feedback on %d nodes x %d times", surface.space.size, tg.steps)
    return FeedbackPolicy(tg, surface.space, table, spec.n_controls, source=surface.label)
