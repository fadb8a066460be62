"""PathEnsemble: simulated state paths with the noise that produced them."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

import numpy as np
import pandas as pd

from domain_kits.forward_sim.grid import TimeGrid


@dataclass(frozen=True, eq=False)
class PathEnsemble:
    """
    states[p, k]               X at node s_k, shape [M, K+1, n]
    brownian_increments[p, k]  dB on (s_k, s_{k+1}], shape [M, K, d]
    jump_counts[p, k, a]       number of jumps of atom a in (s_k, s_{k+1}]
    control_index[p, k]        control grid index used on (s_k, s_{k+1}]

    `weights` is None for Monte Carlo ensembles (equal weights). Enumerated
    ensembles (binary trees) carry outcome probabilities summing to one; their
    averages are exact expectations and carry no sampling error.
    """

    grid: TimeGrid
    x0: np.ndarray
    states: np.ndarray
    brownian_increments: np.ndarray
    jump_counts: np.ndarray
    control_index: np.ndarray
    controls_used: np.ndarray
    seed: Optional[int] = None
    weights: Optional[np.ndarray] = None

    @property
    def n_paths(self) -> int:
        return int(self.states.shape[0])

    @property
    def dim_x(self) -> int:
        return int(self.states.shape[2])

    @property
    def dim_w(self) -> int:
        return int(self.brownian_increments.shape[2])

    @property
    def n_atoms(self) -> int:
        return int(self.jump_counts.shape[2])

    @property
    def is_enumerated(self) -> bool:
        return self.weights is not None

    def mean(self, values: np.ndarray) -> np.ndarray:
        """Average over paths (axis 0), weighted when the ensemble is enumerated."""
        values = np.asarray(values, dtype=float)
        if self.weights is None:
            return values.mean(axis=0)
        return np.tensordot(self.weights, values, axes=(0, 0))

    def stderr(self, values: np.ndarray) -> np.ndarray:
        values = np.asarray(values, dtype=float)
        if self.weights is not None or values.shape[0] < 2:
            return np.zeros(values.shape[1:]) if values.ndim > 1 else np.float64(0.0)
        return values.std(axis=0, ddof=1) / np.sqrt(values.shape[0])

    def shares_noise_with(self, other: "PathEnsemble") -> bool:
        return (
            self.grid == other.grid
            and np.array_equal(self.brownian_increments, other.brownian_increments)
            and np.array_equal(self.jump_counts, other.jump_counts)
        )

    def to_frame(self) -> pd.DataFrame:
        """Long table (path, step, time, x_0.., control_index); the last node repeats the last control."""
        M, K1, n = self.states.shape
        ctrl = np.concatenate([self.control_index, self.control_index[:, -1:]], axis=1)
        frame = {
            "path": np.repeat(np.arange(M), K1),
            "step": np.tile(np.arange(K1), M),
            "time": np.tile(self.grid.nodes, M),
        }
        for i in range(n):
            frame[f"x_{i}"] = self.states[:, :, i].reshape(-1)
        frame["control_index"] = ctrl.reshape(-1)
        return pd.DataFrame(frame)
