"""Uniform rectangular space grids (one or two dimensions for the march)."""

from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property
from typing import List, Sequence, Tuple

import numpy as np

from domain_kits.errors import PreconditionError


@dataclass(frozen=True)
class SpaceGrid:
    lo: Tuple[float, ...]
    hi: Tuple[float, ...]
    points: Tuple[int, ...]

    def __post_init__(self):
        lo = tuple(float(v) for v in np.atleast_1d(self.lo))
        hi = tuple(float(v) for v in np.atleast_1d(self.hi))
        pts = tuple(int(v) for v in np.atleast_1d(self.points))
        if not (len(lo) == len(hi) == len(pts)) or not lo:
            raise PreconditionError("lo, hi and points must have the same non-zero length")
        for a, b, p in zip(lo, hi, pts):
            if not (np.isfinite(a) and np.isfinite(b) and a < b):
                raise PreconditionError("space grid needs finite lo < hi", {"lo": a, "hi": b})
            if p < 3:
                raise PreconditionError("space grid needs at least 3 points per dimension", {"points": p})
        object.__setattr__(self, "lo", lo)
        object.__setattr__(self, "hi", hi)
        object.__setattr__(self, "points", pts)

    @classmethod
    def uniform(cls, lo: float, hi: float, points: int, dim: int = 1) -> "SpaceGrid":
        return cls((lo,) * dim, (hi,) * dim, (points,) * dim)

    @property
    def dim(self) -> int:
        return len(self.points)

    @property
    def shape(self) -> Tuple[int, ...]:
        return self.points

    @property
    def size(self) -> int:
        return int(np.prod(self.points))

    @property
    def axes(self) -> List[np.ndarray]:
        return [np.linspace(a, b, p) for a, b, p in zip(self.lo, self.hi, self.points)]

    @property
    def spacing(self) -> np.ndarray:
        return np.array([(b - a) / (p - 1) for a, b, p in zip(self.lo, self.hi, self.points)])

    def nodes(self) -> np.ndarray:
        """Node coordinates [N, n] in C order of `shape` (read-only)."""
        return self._nodes

    @cached_property
    def _nodes(self) -> np.ndarray:
        mesh = np.meshgrid(*self.axes, indexing="ij")
        out = np.column_stack([m.reshape(-1) for m in mesh])
        out.setflags(write=False)
        return out

    def clamp(self, x: np.ndarray) -> np.ndarray:
        return np.clip(x, np.array(self.lo), np.array(self.hi))

    def refined(self, factor: int = 2) -> "SpaceGrid":
        """Same box, spacing divided by `factor` (old nodes stay nodes)."""
        return SpaceGrid(self.lo, self.hi, tuple((p - 1) * factor + 1 for p in self.points))

    def doubled(self) -> "SpaceGrid":
        """Box twice as wide about its centre at the same spacing."""
        lo, hi, pts = [], [], []
        for a, b, p in zip(self.lo, self.hi, self.points):
            c, half = 0.5 * (a + b), b - a
            lo.append(c - half)
            hi.append(c + half)
            pts.append(2 * (p - 1) + 1)
        return SpaceGrid(tuple(lo), tuple(hi), tuple(pts))

    def nearest_index(self, x: np.ndarray) -> np.ndarray:
        """Nearest node multi-index per point; exact midpoints go to the lower node."""
        x = np.atleast_2d(np.asarray(x, dtype=float))
        out = np.empty(x.shape, dtype=np.int64)
        for i, (a, h, p) in enumerate(zip(self.lo, self.spacing, self.points)):
            r = (np.clip(x[:, i], a, self.hi[i]) - a) / h
            out[:, i] = np.clip(np.ceil(r - 0.5), 0, p - 1).astype(np.int64)
        return out

    def same_as(self, other: "SpaceGrid", tol: float = 1e-12) -> bool:
        return (self.points == other.points
                and np.allclose(self.lo, other.lo, atol=tol, rtol=0.0)
                and np.allclose(self.hi, other.hi, atol=tol, rtol=0.0))

    def to_dict(self) -> dict:
        return {"lo": list(self.lo), "hi": list(self.hi), "points": list(self.points)}


def as_space_grid(lo: Sequence[float], hi: Sequence[float], points: Sequence[int]) -> SpaceGrid:
    return SpaceGrid(tuple(lo), tuple(hi), tuple(points))
