"""
Finite Lévy measures and the jump weight l(e).

The measure is atomic: a finite list of marks e_a in R^l (e_a != 0) with
weights w_a > 0. Every integral against it is the exact weighted sum over
atoms, which is also what the simulator draws from (per-atom Poisson clocks).
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, List, Tuple

import numpy as np

from domain_kits.errors import IllPosedSpecError


@dataclass(frozen=True)
class LevyMeasure:
    """Atomic measure: marks has shape (atoms, mark_dim), weights shape (atoms,)."""

    marks: np.ndarray
    weights: np.ndarray
    total_mass: float = field(init=False)

    def __post_init__(self):
        marks = np.atleast_2d(np.asarray(self.marks, dtype=float))
        weights = np.atleast_1d(np.asarray(self.weights, dtype=float))
        if marks.size == 0:
            mark_dim = marks.shape[1] if marks.ndim == 2 and marks.shape[1] > 0 else 1
            marks = np.zeros((0, mark_dim))
            weights = np.zeros(0)
        if marks.shape[0] != weights.shape[0]:
            raise IllPosedSpecError(
                "Lévy marks and weights disagree in length",
                {"marks": int(marks.shape[0]), "weights": int(weights.shape[0])},
            )
        if not (np.all(np.isfinite(marks)) and np.all(np.isfinite(weights))):
            raise IllPosedSpecError("Lévy atoms must be finite")
        if np.any(weights <= 0.0):
            raise IllPosedSpecError("Lévy atom weights must be strictly positive")
        if marks.shape[0] and np.any(np.all(marks == 0.0, axis=1)):
            raise IllPosedSpecError("Lévy atom at the zero mark is not allowed")
        marks.setflags(write=False)
        weights.setflags(write=False)
        object.__setattr__(self, "marks", marks)
        object.__setattr__(self, "weights", weights)
        object.__setattr__(self, "total_mass", float(np.sum(weights)))

    @classmethod
    def empty(cls, mark_dim: int = 1) -> "LevyMeasure":
        return cls(np.zeros((0, mark_dim)), np.zeros(0))

    @classmethod
    def from_atoms(cls, atoms: List[Tuple[List[float], float]], mark_dim: int = 1) -> "LevyMeasure":
        if not atoms:
            return cls.empty(mark_dim)
        marks = np.array([np.atleast_1d(np.asarray(m, dtype=float)) for m, _ in atoms])
        weights = np.array([float(w) for _, w in atoms])
        return cls(marks, weights)

    @property
    def n_atoms(self) -> int:
        return int(self.marks.shape[0])

    @property
    def mark_dim(self) -> int:
        return int(self.marks.shape[1])

    @property
    def norms(self) -> np.ndarray:
        return np.linalg.norm(self.marks, axis=1)

    @property
    def atoms(self) -> List[Tuple[np.ndarray, float]]:
        return [(self.marks[a], float(self.weights[a])) for a in range(self.n_atoms)]

    def to_dict(self) -> dict:
        return {
            "atoms": [{"mark": m.tolist(), "weight": w} for m, w in self.atoms],
            "total_mass": self.total_mass,
        }


@dataclass(frozen=True)
class JumpWeight:
    """l(e) with the bound 0 <= l(e) <= kappa * min(1, |e|)."""

    kappa: float
    eval: Callable[[np.ndarray], float]
    label: str = "custom"

    def __post_init__(self):
        if not (np.isfinite(self.kappa) and self.kappa > 0.0):
            raise IllPosedSpecError("jump weight kappa must be a positive finite number")

    @classmethod
    def truncated(cls, kappa: float, scale: float = 1.0) -> "JumpWeight":
        """l(e) = scale * min(1, |e|); needs 0 <= scale <= kappa to pass the bound."""
        scale = float(scale)
        return cls(
            kappa=float(kappa),
            eval=lambda e: scale * min(1.0, float(np.linalg.norm(e))),
            label=f"truncated(scale={scale!r})",
        )

    @classmethod
    def zero(cls, kappa: float = 1.0) -> "JumpWeight":
        return cls(kappa=float(kappa), eval=lambda e: 0.0, label="zero")

    def values(self, levy: LevyMeasure) -> np.ndarray:
        out = np.array([float(self.eval(m)) for m in levy.marks], dtype=float)
        if not np.all(np.isfinite(out)):
            raise IllPosedSpecError("jump weight is not finite on every atom")
        return out

    def check(self, levy: LevyMeasure) -> None:
        """Raise unless 0 <= l(e) <= kappa * min(1, |e|) on every atom."""
        vals = self.values(levy)
        cap = self.kappa * np.minimum(1.0, levy.norms)
        bad = np.where((vals < 0.0) | (vals > cap + 1e-15))[0]
        if bad.size:
            a = int(bad[0])
            raise IllPosedSpecError(
                "jump weight violates 0 <= l(e) <= kappa*min(1,|e|)",
                {"atom": a, "l": float(vals[a]), "cap": float(cap[a])},
            )


def levy_integral(levy: LevyMeasure, g: Callable[[np.ndarray], float]) -> float:
    """Exact integral of g against the atomic measure: sum_a w_a g(e_a)."""
    if levy.n_atoms == 0:
        return 0.0
    vals = np.array([float(g(m)) for m in levy.marks], dtype=float)
    if not np.all(np.isfinite(vals)):
        bad = int(np.where(~np.isfinite(vals))[0][0])
        raise IllPosedSpecError("integrand is not finite on an atom", {"atom": bad})
    return float(np.dot(levy.weights, vals))


def aggregate_v(levy: LevyMeasure, jump_weight: JumpWeight, V: Callable[[np.ndarray], float]) -> float:
    """Driver jump argument: sum_a w_a l(e_a) V(e_a)."""
    return levy_integral(levy, lambda e: jump_weight.eval(e) * V(e))
