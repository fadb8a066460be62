"""
Control laws for the forward simulation.

A law returns, for step k at time t and states x[P,n], the index into the
spec's control grid used on (s_k, s_{k+1}]. Three classes are supported:
a constant control, a fixed per-step table and a feedback map (t, x) -> index.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Union

import numpy as np

from domain_kits.errors import PreconditionError


class ControlLaw:
    label = "control"

    def indices(self, k: int, t: float, x: np.ndarray) -> np.ndarray:
        raise NotImplementedError

    def describe(self) -> dict:
        return {"kind": self.label}


@dataclass(frozen=True)
class ConstantControl(ControlLaw):
    index: int = 0
    label = "constant"

    def indices(self, k, t, x):
        return np.full(x.shape[0], int(self.index), dtype=np.int64)

    def describe(self) -> dict:
        return {"kind": self.label, "index": int(self.index)}


@dataclass(frozen=True)
class ControlTable(ControlLaw):
    """table[k] (same index on every path) or table[p, k] (per path)."""

    table: np.ndarray
    label = "table"

    def indices(self, k, t, x):
        tab = np.asarray(self.table, dtype=np.int64)
        if tab.ndim == 1:
            return np.full(x.shape[0], int(tab[k]), dtype=np.int64)
        return tab[:, k].copy()

    def describe(self) -> dict:
        return {"kind": self.label, "shape": list(np.shape(self.table))}


@dataclass(frozen=True)
class FeedbackControl(ControlLaw):
    lookup: Callable[[float, np.ndarray], np.ndarray]
    label = "feedback"

    def indices(self, k, t, x):
        return np.asarray(self.lookup(t, x), dtype=np.int64)


def as_control_law(control: Union[int, ControlLaw, Callable]) -> ControlLaw:
    if isinstance(control, ControlLaw):
        return control
    if isinstance(control, (int, np.integer)):
        return ConstantControl(int(control))
    if callable(control):
        return FeedbackControl(control)
    raise PreconditionError(f"unsupported control law: {type(control).__name__}")
