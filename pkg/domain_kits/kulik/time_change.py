"""
Deterministic time stretching between [t_i, T] and [t_lambda, T].

    t_lambda = (1 - lam) t0 + lam t1
    tau_i(s) = t_lambda + (T - t_lambda) / (T - t_i) (s - t_i),  s in [t_i, T]
    rho_i(s) = t_i + (T - t_i) / (T - t_lambda) (s - t_lambda), s in [t_lambda, T]

rate(i) is the constant derivative of tau_i.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Dict, Union

import numpy as np

from domain_kits.errors import PreconditionError, WindowError

Times = Union[float, np.ndarray]

# relative slack on window membership, so grid endpoints built by arithmetic pass
WINDOW_SLACK = 1e-12


@dataclass(frozen=True)
class TimeChange:
    t0: float
    t1: float
    lam: float
    T: float

    def __post_init__(self):
        for name in ("t0", "t1", "lam", "T"):
            object.__setattr__(self, name, float(getattr(self, name)))
        if not np.isfinite([self.t0, self.t1, self.lam, self.T]).all():
            raise PreconditionError("time change parameters must be finite", self.to_dict())
        if not (0.0 <= self.t0 < self.T and 0.0 <= self.t1 < self.T):
            raise PreconditionError("need 0 <= t0, t1 < T", self.to_dict())
        if not 0.0 <= self.lam <= 1.0:
            raise PreconditionError("lambda must lie in [0, 1]", self.to_dict())

    @property
    def t_lambda(self) -> float:
        return (1.0 - self.lam) * self.t0 + self.lam * self.t1

    def start(self, i: int) -> float:
        if i not in (0, 1):
            raise PreconditionError("time change index must be 0 or 1", {"i": i})
        return self.t1 if i == 1 else self.t0

    def rate(self, i: int) -> float:
        """d tau_i / ds = (T - t_lambda) / (T - t_i)."""
        return (self.T - self.t_lambda) / (self.T - self.start(i))

    def to_dict(self) -> Dict[str, float]:
        return {"t0": self.t0, "t1": self.t1, "lam": self.lam, "T": self.T}


def _in_window(s: Times, lo: float, hi: float, what: str) -> np.ndarray:
    arr = np.asarray(s, dtype=float)
    slack = WINDOW_SLACK * max(1.0, abs(hi))
    if np.any(~np.isfinite(arr)) or np.any(arr < lo - slack) or np.any(arr > hi + slack):
        raise WindowError(f"{what} argument outside its window",
                          {"window": [lo, hi], "min": float(np.min(arr)), "max": float(np.max(arr))})
    return arr


def _out(arr: np.ndarray, s: Times) -> Times:
    return float(arr) if np.ndim(s) == 0 else arr


def tau(tc: TimeChange, i: int, s: Times) -> Times:
    """Map [t_i, T] onto [t_lambda, T]; both endpoints are hit exactly."""
    ti, tl = tc.start(i), tc.t_lambda
    arr = _in_window(s, ti, tc.T, "tau")
    out = tl + (tc.T - tl) / (tc.T - ti) * (arr - ti)
    out = np.where(arr == ti, tl, np.where(arr == tc.T, tc.T, out))
    return _out(out, s)


def rho(tc: TimeChange, i: int, s: Times) -> Times:
    """Inverse of tau: map [t_lambda, T] back onto [t_i, T]."""
    ti, tl = tc.start(i), tc.t_lambda
    arr = _in_window(s, tl, tc.T, "rho")
    out = ti + (tc.T - ti) / (tc.T - tl) * (arr - tl)
    out = np.where(arr == tl, ti, np.where(arr == tc.T, tc.T, out))
    return _out(out, s)
