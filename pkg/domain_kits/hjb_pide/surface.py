"""
ValueSurface: W[time][node] on a TimeGrid x SpaceGrid.

Interpolation is multilinear in (t, x); points outside the box are clamped to
it, so jump destinations beyond a face take the face value.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import cached_property
from typing import Callable, Optional, Tuple

import numpy as np
import pandas as pd
from scipy.interpolate import RegularGridInterpolator

from domain_kits.errors import GridMismatchError, PreconditionError
from domain_kits.forward_sim.grid import TimeGrid
from domain_kits.hjb_pide.grid import SpaceGrid

OBSTACLE = "obstacle"
PENALIZED = "penalized"


@dataclass(frozen=True, eq=False)
class ValueSurface:
    times: TimeGrid
    space: SpaceGrid
    values: np.ndarray
    mode: str = OBSTACLE
    penalty: Optional[float] = None
    meta: dict = field(default_factory=dict)

    def __post_init__(self):
        vals = np.asarray(self.values, dtype=float)
        expected = (self.times.steps + 1,) + self.space.shape
        if vals.shape != expected:
            vals = vals.reshape(expected) if vals.size == int(np.prod(expected)) else vals
        if vals.shape != expected:
            raise PreconditionError("surface values do not match the grids",
                                    {"shape": list(np.shape(self.values)), "expected": list(expected)})
        if self.mode not in (OBSTACLE, PENALIZED):
            raise PreconditionError("surface mode must be obstacle or penalized", {"mode": self.mode})
        vals.setflags(write=False)
        object.__setattr__(self, "values", vals)

    @property
    def label(self) -> str:
        if self.mode == PENALIZED:
            return f"penalized(n={self.penalty:g})"
        return OBSTACLE

    @cached_property
    def _interpolator(self) -> RegularGridInterpolator:
        return RegularGridInterpolator(
            (np.asarray(self.times.nodes),) + tuple(self.space.axes), self.values,
            method="linear", bounds_error=False, fill_value=None,
        )

    def interpolate(self, t: float, x: np.ndarray):
        """W(t, x) for x of shape [n] (returns float) or [P, n] (returns [P])."""
        x = np.asarray(x, dtype=float)
        single = x.ndim == 1
        pts = self.space.clamp(np.atleast_2d(x))
        tt = float(np.clip(t, self.times.t0, self.times.T))
        out = self._interpolator(np.column_stack([np.full(pts.shape[0], tt), pts]))
        return float(out[0]) if single else out

    def time_index(self, t: float, tol: float = 1e-9) -> int:
        k = int(np.argmin(np.abs(self.times.nodes - t)))
        if abs(self.times.nodes[k] - t) > tol:
            raise PreconditionError("time is not a node of the surface", {"t": t})
        return k

    def at(self, k: int) -> np.ndarray:
        """Node values at time index k, flattened to [N]."""
        return self.values[int(k)].reshape(-1)

    def stencil(self, k: int):
        from domain_kits.hjb_pide.operators import Stencil
        return Stencil.from_values(self.values[int(k)], self.space)

    def derivatives(self, t: float, x: np.ndarray) -> Tuple[np.ndarray, np.ndarray]:
        """Gradient and Hessian at (t, x) by differences of the interpolant.

        x of shape [n] gives ([n], [n, n]); [P, n] gives ([P, n], [P, n, n]).
        Steps are the grid spacing; gradients go one-sided at a face and
        second differences are centred one node inside the box.
        """
        x = np.asarray(x, dtype=float)
        single = x.ndim == 1
        X = self.space.clamp(np.atleast_2d(x))
        P, n = X.shape
        hs = self.space.spacing
        lo, hi = np.array(self.space.lo), np.array(self.space.hi)
        eye = np.eye(n)
        grad = np.empty((P, n))
        hess = np.empty((P, n, n))
        for i in range(n):
            xp = np.minimum(X + hs[i] * eye[i], hi)
            xm = np.maximum(X - hs[i] * eye[i], lo)
            grad[:, i] = (self.interpolate(t, xp) - self.interpolate(t, xm)) / (xp[:, i] - xm[:, i])
        C = np.clip(X, lo + hs, hi - hs)
        wc = self.interpolate(t, C)
        for i in range(n):
            ei = hs[i] * eye[i]
            hess[:, i, i] = (self.interpolate(t, C + ei) - 2.0 * wc + self.interpolate(t, C - ei)) / hs[i] ** 2
            for j in range(i + 1, n):
                ej = hs[j] * eye[j]
                cross = (self.interpolate(t, C + ei + ej) - self.interpolate(t, C + ei - ej)
                         - self.interpolate(t, C - ei + ej) + self.interpolate(t, C - ei - ej))
                hess[:, i, j] = hess[:, j, i] = cross / (4.0 * hs[i] * hs[j])
        if single:
            return grad[0], hess[0]
        return grad, hess

    def same_grid(self, other: "ValueSurface", tol: float = 1e-9) -> bool:
        return (self.times.steps == other.times.steps
                and abs(self.times.t0 - other.times.t0) <= tol
                and abs(self.times.T - other.times.T) <= tol
                and self.space.same_as(other.space, tol))

    def require_same_grid(self, other: "ValueSurface") -> None:
        if not self.same_grid(other):
            raise GridMismatchError("surfaces live on different grids", {
                "left": {"time": self.times.to_dict(), "space": self.space.to_dict()},
                "right": {"time": other.times.to_dict(), "space": other.space.to_dict()},
            })

    def to_frame(self) -> pd.DataFrame:
        X = self.space.nodes()
        K1, N = self.times.steps + 1, self.space.size
        data = {"t": np.repeat(np.asarray(self.times.nodes), N)}
        for i in range(self.space.dim):
            data[f"x_{i}"] = np.tile(X[:, i], K1)
        data["W"] = self.values.reshape(-1)
        return pd.DataFrame(data)

    @classmethod
    def from_frame(cls, df: pd.DataFrame, mode: str = OBSTACLE, penalty: Optional[float] = None) -> "ValueSurface":
        """Rebuild a surface from a dump written by `to_frame`."""
        xcols = sorted((c for c in df.columns if c.startswith("x_")), key=lambda c: int(c[2:]))
        if "t" not in df.columns or "W" not in df.columns or not xcols:
            raise PreconditionError("surface dump needs t, x_i and W columns", {"columns": list(df.columns)})
        df = df.sort_values(["t"] + xcols, kind="mergesort")
        ts = np.unique(df["t"].to_numpy(dtype=float))
        axes = [np.unique(df[c].to_numpy(dtype=float)) for c in xcols]
        if len(df) != len(ts) * int(np.prod([len(a) for a in axes])):
            raise PreconditionError("surface dump is not a full tensor grid", {"rows": len(df)})
        times = TimeGrid(float(ts[0]), float(ts[-1]), len(ts) - 1)
        space = SpaceGrid(tuple(a[0] for a in axes), tuple(a[-1] for a in axes), tuple(len(a) for a in axes))
        return cls(times, space, df["W"].to_numpy(dtype=float), mode=mode, penalty=penalty)

    @classmethod
    def from_function(
        cls,
        times: TimeGrid,
        space: SpaceGrid,
        fn: Callable[[float, np.ndarray], np.ndarray],
        mode: str = OBSTACLE,
        penalty: Optional[float] = None,
    ) -> "ValueSurface":
        """Sample fn(t, X[N,n]) -> [N] on every node."""
        X = space.nodes()
        vals = np.stack([np.asarray(fn(float(t), X), dtype=float) for t in times.nodes])
        return cls(times, space, vals, mode=mode, penalty=penalty)

    def to_dict(self) -> dict:
        return {"mode": self.mode, "penalty": self.penalty, "time": self.times.to_dict(),
                "space": self.space.to_dict(), **self.meta}
