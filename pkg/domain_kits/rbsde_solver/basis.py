"""
Regression bases for conditional expectations E[. | X_k].

polynomial       Legendre products of total degree <= degree on the box
local-partition  indicators of a uniform cell partition of the box
exact            one indicator per distinct state (enumerated trees)

The box may be fixed or, when None, taken from the data at each step.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import Optional, Tuple

import numpy as np
from numpy.polynomial import legendre

from domain_kits.errors import PreconditionError, SingularDesignError

KINDS = ("polynomial", "local-partition", "exact")


@dataclass(frozen=True)
class RegressionBasis:
    kind: str = "polynomial"
    degree: int = 3
    cells: int = 8
    box: Optional[Tuple[float, float]] = None

    def __post_init__(self):
        if self.kind not in KINDS:
            raise PreconditionError(f"unknown basis kind {self.kind!r}", {"known": list(KINDS)})
        if self.kind == "polynomial" and not 0 <= int(self.degree) <= 8:
            raise PreconditionError("polynomial degree must be in [0, 8]", {"degree": self.degree})
        if self.kind == "local-partition" and int(self.cells) < 1:
            raise PreconditionError("local partition needs at least one cell", {"cells": self.cells})
        if self.box is not None and not float(self.box[0]) < float(self.box[1]):
            raise PreconditionError("basis box must satisfy lo < hi", {"box": list(self.box)})

    @classmethod
    def polynomial(cls, degree: int = 3, box: Optional[Tuple[float, float]] = None) -> "RegressionBasis":
        return cls("polynomial", degree=degree, box=box)

    @classmethod
    def local_partition(cls, cells: int = 8, box: Optional[Tuple[float, float]] = None) -> "RegressionBasis":
        return cls("local-partition", cells=cells, box=box)

    @classmethod
    def exact(cls) -> "RegressionBasis":
        return cls("exact")

    def _bounds(self, x: np.ndarray) -> Tuple[np.ndarray, np.ndarray]:
        if self.box is not None:
            n = x.shape[1]
            return np.full(n, float(self.box[0])), np.full(n, float(self.box[1]))
        return x.min(axis=0), x.max(axis=0)

    def design(self, x: np.ndarray) -> np.ndarray:
        """Design matrix [P, J] evaluated at states x[P, n]."""
        x = np.asarray(x, dtype=float)
        if self.kind == "exact":
            keys = np.round(x, 12)
            _, inverse = np.unique(keys, axis=0, return_inverse=True)
            inverse = np.asarray(inverse).reshape(-1)
            out = np.zeros((x.shape[0], int(inverse.max()) + 1))
            out[np.arange(x.shape[0]), inverse] = 1.0
            return out

        lo, hi = self._bounds(x)
        width = hi - lo
        safe = np.where(width > 0.0, width, 1.0)
        scaled = np.where(width > 0.0, 2.0 * (np.clip(x, lo, hi) - lo) / safe - 1.0, 0.0)

        if self.kind == "local-partition":
            c = int(self.cells)
            cell = np.minimum(((scaled + 1.0) * 0.5 * c).astype(np.int64), c - 1)
            flat = np.ravel_multi_index(tuple(cell.T), (c,) * x.shape[1])
            out = np.zeros((x.shape[0], c ** x.shape[1]))
            out[np.arange(x.shape[0]), flat] = 1.0
            return out

        deg = int(self.degree)
        vander = [legendre.legvander(scaled[:, i], deg) for i in range(x.shape[1])]
        cols = []
        for alpha in itertools.product(range(deg + 1), repeat=x.shape[1]):
            if sum(alpha) > deg:
                continue
            col = np.ones(x.shape[0])
            for i, a in enumerate(alpha):
                col = col * vander[i][:, a]
            cols.append(col)
        return np.column_stack(cols)

    def project(self, x: np.ndarray, targets: np.ndarray,
                weights: Optional[np.ndarray] = None) -> Tuple[np.ndarray, np.ndarray]:
        """
        Least-squares projection of targets[P, r] on the basis at x.

        Returns (fitted values [P, r], residual standard deviation per column).
        Rank-deficient designs get the minimum-norm solution.
        """
        x = np.asarray(x, dtype=float)
        if not np.all(np.isfinite(x)):
            raise SingularDesignError("regression states are not finite")
        A = self.design(x)
        B = np.asarray(targets, dtype=float)
        if B.ndim == 1:
            B = B[:, None]
        if not (np.all(np.isfinite(A)) and np.all(np.isfinite(B))):
            raise SingularDesignError("regression inputs are not finite")
        sw = np.ones(A.shape[0]) if weights is None else np.sqrt(np.asarray(weights, dtype=float))
        coef, _, rank, _ = np.linalg.lstsq(A * sw[:, None], B * sw[:, None], rcond=None)
        if rank == 0:
            raise SingularDesignError("regression design has rank 0", {"kind": self.kind, "columns": A.shape[1]})
        fitted = A @ coef
        resid = B - fitted
        if weights is None:
            spread = np.sqrt(np.mean(resid ** 2, axis=0))
        else:
            spread = np.sqrt(np.asarray(weights, dtype=float) @ resid ** 2)
        return fitted, spread

    def n_functions(self, dim: int) -> int:
        if self.kind == "polynomial":
            return sum(1 for a in itertools.product(range(int(self.degree) + 1), repeat=dim)
                       if sum(a) <= int(self.degree))
        if self.kind == "local-partition":
            return int(self.cells) ** dim
        return -1

    def to_dict(self) -> dict:
        return {"kind": self.kind, "degree": self.degree, "cells": self.cells,
                "box": None if self.box is None else list(self.box)}
