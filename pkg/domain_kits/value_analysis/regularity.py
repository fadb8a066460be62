"""
Sampled regularity probes of a value function W(t, x).

For triples (t0, x0), (t1, x1), lam the probe records

    semiconcavity excess  [lam W1 + (1-lam) W0 - W_lam] / [lam (1-lam) (|dt|^2 + |dx|^2)]
    joint Lipschitz ratio |W1 - W0| / (|dt| + |dx|)
    Lipschitz ratio in x  |W(t0, x1) - W(t0, x0)| / |dx|

and reports the maxima. Times are restricted to [t0, T - margin].
"""

from __future__ import annotations

import logging
from dataclasses import dataclass
from typing import Callable, Dict, Optional, Tuple, Union

import numpy as np

from domain_kits.errors import PreconditionError
from domain_kits.forward_sim.rng import CHANNEL_PROBES, stream
from domain_kits.hjb_pide.surface import ValueSurface

logger = logging.getLogger(__name__)

DEGENERATE = 1e-14

ValueFunction = Callable[[float, np.ndarray], np.ndarray]


@dataclass(frozen=True, eq=False)
class RegularityReport:
    lipschitz_x: float
    joint_lipschitz: float
    semiconcavity: float
    probes: int
    skipped: int
    seed: int
    margin: float
    radius: Optional[float]
    min_separation: float
    excess: np.ndarray
    joint_ratio: np.ndarray
    x_ratio: np.ndarray
    samples: np.ndarray  # [used, 2 + 2n + 1]: t0, t1, x0.., x1.., lam

    def to_dict(self) -> Dict:
        return {
            "lipschitz_x": self.lipschitz_x,
            "joint_lipschitz": self.joint_lipschitz,
            "semiconcavity": self.semiconcavity,
            "probes": self.probes,
            "skipped": self.skipped,
            "seed": self.seed,
            "margin": self.margin,
            "radius": self.radius,
            "min_separation": self.min_separation,
        }


def _evaluator(surface: Union[ValueSurface, ValueFunction]) -> ValueFunction:
    if isinstance(surface, ValueSurface):
        return surface.interpolate
    return surface


def regularity_probe(
    surface: Union[ValueSurface, ValueFunction],
    triples: int = 1000,
    seed: int = 0,
    margin: Optional[float] = None,
    radius: Optional[float] = None,
    box: Optional[Tuple[np.ndarray, np.ndarray]] = None,
    time_range: Optional[Tuple[float, float]] = None,
    min_separation: float = 0.0,
) -> RegularityReport:
    """Probe W on `triples` random triples; deterministic under `seed`.

    A ValueSurface supplies its own box and time range; a plain callable
    W(t, X[P, n]) -> [P] needs `box` and `time_range`. With `radius` the
    second point stays within that distance of the first in t and each x_i,
    which localizes the probe. Pairs closer than `min_separation` in
    sqrt(dt^2 + |dx|^2) are skipped; on a grid surface this keeps the probe
    off the kinks of the interpolant.
    """
    if isinstance(surface, ValueSurface):
        lo = np.array(surface.space.lo) if box is None else np.asarray(box[0], dtype=float)
        hi = np.array(surface.space.hi) if box is None else np.asarray(box[1], dtype=float)
        t_lo, t_hi = (surface.times.t0, surface.times.T) if time_range is None else time_range
    else:
        if box is None or time_range is None:
            raise PreconditionError("a callable value function needs box and time_range")
        lo, hi = np.asarray(box[0], dtype=float).reshape(-1), np.asarray(box[1], dtype=float).reshape(-1)
        t_lo, t_hi = time_range
    m = 0.1 * (t_hi - t_lo) if margin is None else float(margin)
    t_top = t_hi - m
    if not (t_top > t_lo and np.all(hi > lo)):
        raise PreconditionError("empty probe region", {"t": [t_lo, t_top], "lo": lo.tolist(), "hi": hi.tolist()})
    W = _evaluator(surface)
    n, P = lo.shape[0], int(triples)

    rng = stream(seed, CHANNEL_PROBES, 0)
    t0 = rng.uniform(t_lo, t_top, P)
    x0 = rng.uniform(lo, hi, (P, n))
    if radius is None:
        t1 = rng.uniform(t_lo, t_top, P)
        x1 = rng.uniform(lo, hi, (P, n))
    else:
        t1 = np.clip(t0 + radius * rng.uniform(-1.0, 1.0, P), t_lo, t_top)
        x1 = np.clip(x0 + radius * rng.uniform(-1.0, 1.0, (P, n)), lo, hi)
    lam = rng.uniform(0.0, 1.0, P)

    dt = np.abs(t1 - t0)
    dx = np.linalg.norm(x1 - x0, axis=1)
    denom = lam * (1.0 - lam) * (dt ** 2 + dx ** 2)
    keep = (denom > DEGENERATE) & (dx > DEGENERATE) & (np.hypot(dt, dx) >= float(min_separation))
    skipped = int(P - np.sum(keep))
    t0, t1, x0, x1, lam, dt, dx, denom = (a[keep] for a in (t0, t1, x0, x1, lam, dt, dx, denom))

    tl = lam * t1 + (1.0 - lam) * t0
    xl = lam[:, None] * x1 + (1.0 - lam[:, None]) * x0
    w0, w1 = np.empty(len(t0)), np.empty(len(t0))
    wl, w0x1 = np.empty(len(t0)), np.empty(len(t0))
    for i in range(len(t0)):
        w0[i] = np.asarray(W(float(t0[i]), x0[i:i + 1]), dtype=float).reshape(-1)[0]
        w1[i] = np.asarray(W(float(t1[i]), x1[i:i + 1]), dtype=float).reshape(-1)[0]
        wl[i] = np.asarray(W(float(tl[i]), xl[i:i + 1]), dtype=float).reshape(-1)[0]
        w0x1[i] = np.asarray(W(float(t0[i]), x1[i:i + 1]), dtype=float).reshape(-1)[0]

    excess = (lam * w1 + (1.0 - lam) * w0 - wl) / denom
    joint = np.abs(w1 - w0) / (dt + dx)
    xr = np.abs(w0x1 - w0) / dx
    if not (np.all(np.isfinite(excess)) and np.all(np.isfinite(joint)) and np.all(np.isfinite(xr))):
        raise PreconditionError("value function returned non-finite values at a probe")
    samples = np.column_stack([t0, t1, x0, x1, lam])
    report = RegularityReport(
        lipschitz_x=float(np.max(xr)) if xr.size else 0.0,
        joint_lipschitz=float(np.max(joint)) if joint.size else 0.0,
        semiconcavity=float(np.max(excess)) if excess.size else 0.0,
        probes=P, skipped=skipped, seed=int(seed), margin=m, radius=radius,
        min_separation=float(min_separation),
        excess=excess, joint_ratio=joint, x_ratio=xr, samples=samples,
    )
    logger.info("regularity probe: %d triples (%d skipped), semiconcavity %.4g", P, skipped, report.semiconcavity)
    return report
