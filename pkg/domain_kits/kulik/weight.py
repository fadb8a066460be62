"""
Change-of-measure weight for the time-changed jump measure.

Jumps of N on [t_lambda, T] relabelled through rho_i form a point process on
[t_i, T]. Under g P with

    g = ((T - t_i) / (T - t_lambda)) ** count * exp((t_i - t_lambda) nu(E))

its compensator is nu(de) ds again, i.e. the expected count is (T - t_i) nu(E).
"""

from __future__ import annotations

from typing import Any, Dict, Union

import numpy as np

from domain_kits.errors import PreconditionError
from domain_kits.forward_sim.rng import CHANNEL_KULIK, stream
from domain_kits.kulik.time_change import TimeChange

Counts = Union[int, np.ndarray]


def girsanov_weight(tc: TimeChange, i: int, jump_count: Counts, nu_mass: float):
    """Weight g for the number of jumps on [t_lambda, T]; vectorized over counts."""
    ti = tc.start(i)
    if ti >= tc.T:
        raise PreconditionError("time change start must be below T", {"t_i": ti, "T": tc.T})
    counts = np.asarray(jump_count)
    if not np.issubdtype(counts.dtype, np.integer):
        if np.any(counts != np.floor(counts)):
            raise PreconditionError("jump counts must be integers")
        counts = counts.astype(np.int64)
    if np.any(counts < 0):
        raise PreconditionError("jump counts must be >= 0")
    if not (np.isfinite(nu_mass) and nu_mass >= 0.0):
        raise PreconditionError("nu mass must be finite and >= 0", {"nu_mass": nu_mass})
    tl = tc.t_lambda
    log_ratio = np.log((tc.T - tl) / (tc.T - ti))
    out = np.exp(-log_ratio * counts + (ti - tl) * float(nu_mass))
    return float(out) if np.ndim(jump_count) == 0 else out


def weight_check(tc: TimeChange, i: int, nu_mass: float, n_samples: int = 200000,
                 seed: int = 0) -> Dict[str, Any]:
    """Sample Poisson((T - t_lambda) nu(E)) counts; report E[g] and E[g N] with errors."""
    if int(n_samples) < 2:
        raise PreconditionError("need at least two samples", {"n_samples": n_samples})
    mu = (tc.T - tc.t_lambda) * float(nu_mass)
    counts = stream(seed, CHANNEL_KULIK, 0).poisson(mu, int(n_samples))
    g = girsanov_weight(tc, i, counts, nu_mass)
    gn = g * counts
    root = np.sqrt(len(counts))
    return {
        "mean_weight": float(g.mean()),
        "weight_stderr": float(g.std(ddof=1) / root),
        "reweighted_count": float(gn.mean()),
        "count_stderr": float(gn.std(ddof=1) / root),
        "expected_count": (tc.T - tc.start(i)) * float(nu_mass),
        "raw_count": float(counts.mean()),
        "n_samples": int(n_samples),
        "seed": int(seed),
    }
