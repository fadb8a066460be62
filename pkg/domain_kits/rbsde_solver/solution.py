"""BackwardSolution: per-path, per-node values of (Y, Z, Gamma, A)."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

import numpy as np
import pandas as pd

from domain_kits.forward_sim.grid import TimeGrid

PENALIZED = "penalized"
REFLECTED = "reflected"


@dataclass(frozen=True, eq=False)
class BackwardSolution:
    """
    Y[p, k], Gamma[p, k], A[p, k] have shape [M, K+1]; Z[p, k] has shape [M, K+1, d].
    dA[p, k] is the push applied at node k (shape [M, K]); A[p, k] = sum_{j<k} dA[p, j],
    so A[:, 0] = 0. In reflected mode Y_tilde holds the values before projection.
    Z, Gamma at the terminal node are zero.
    """

    grid: TimeGrid
    Y: np.ndarray
    Z: np.ndarray
    Gamma: np.ndarray
    A: np.ndarray
    dA: np.ndarray
    mode: str
    penalty: Optional[float]
    y0: float
    y0_stderr: float
    step_stderr: np.ndarray
    Y_tilde: Optional[np.ndarray] = None

    @property
    def label(self) -> str:
        return REFLECTED if self.mode == REFLECTED else f"{PENALIZED}(n={self.penalty:g})"

    def to_frame(self) -> pd.DataFrame:
        M, K1 = self.Y.shape
        frame = {
            "path": np.repeat(np.arange(M), K1),
            "step": np.tile(np.arange(K1), M),
            "time": np.tile(self.grid.nodes, M),
            "Y": self.Y.reshape(-1),
        }
        for j in range(self.Z.shape[2]):
            frame[f"Z_{j}"] = self.Z[:, :, j].reshape(-1)
        frame["Gamma"] = self.Gamma.reshape(-1)
        frame["A"] = self.A.reshape(-1)
        return pd.DataFrame(frame)
