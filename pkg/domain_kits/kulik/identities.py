"""
Checks of the relations satisfied by a pair of time changes on [t_lambda, T - delta].

    (a) |rho_1 - rho_0| + |1/r_1 - 1/r_0| + |1/sqrt r_1 - 1/sqrt r_0| <= C_delta |t1 - t0|
    (b) lam |1 - 1/sqrt r_1| + (1-lam) |1 - 1/sqrt r_0|         <= c_b lam (1-lam) |t1 - t0|
    (c) |lam (1 - 1/sqrt r_1) + (1-lam) (1 - 1/sqrt r_0)|        <= lam (1-lam) |t1 - t0|^2 / (8 delta^2)
    (d) lam (1 - 1/r_1) = -(1-lam) (1 - 1/r_0) = lam (1-lam) (t1 - t0) / (T - t_lambda)
    (e) lam rho_1(s) + (1-lam) rho_0(s) = s

where r_i = rate(i). Both starts must lie in [0, T - delta]; there
C_delta = 1 + 3 / (2 delta) and c_b = 1 / delta, which tightens to 1 / (2 delta)
when both starts lie in [0, T - 2 delta].
"""

from __future__ import annotations

import logging
from typing import Any, Dict, Union

import numpy as np

from domain_kits.errors import PreconditionError, WindowError
from domain_kits.kulik.time_change import WINDOW_SLACK, TimeChange, rho

logger = logging.getLogger(__name__)

EXACT_TOL = 1e-14
BOUND_SLACK = 1e-12


def c_delta(delta: float) -> float:
    return 1.0 + 1.5 / delta


def weighted_constant(tc: TimeChange, delta: float) -> float:
    """Constant of relation (b) for this pair of starts."""
    return 0.5 / delta if max(tc.t0, tc.t1) <= tc.T - 2.0 * delta else 1.0 / delta


def _bound(value: float, bound: float, constant: float) -> Dict[str, Any]:
    return {"value": value, "bound": bound, "constant": constant,
            "ok": bool(value <= bound + BOUND_SLACK * (1.0 + bound))}


def _exact(error: float, scale: float) -> Dict[str, Any]:
    return {"error": error, "tolerance": EXACT_TOL * max(1.0, scale),
            "ok": bool(error <= EXACT_TOL * max(1.0, scale))}


def identity_suite(tc: TimeChange, delta: float, samples: Union[int, np.ndarray] = 64) -> Dict[str, Any]:
    """Evaluate relations (a)-(e) on `samples` points of [t_lambda, T - delta].

    An int gives an evenly spaced set including both ends; an array is used as
    given and must lie inside the window.
    """
    delta = float(delta)
    if not 0.0 < delta < tc.T:
        raise PreconditionError("delta must lie in (0, T)", {"delta": delta, "T": tc.T})
    top = tc.T - delta
    if max(tc.t0, tc.t1) > top + WINDOW_SLACK * max(1.0, tc.T):
        raise WindowError("t0 and t1 must lie in [0, T - delta]", {**tc.to_dict(), "delta": delta})
    tl = tc.t_lambda
    if isinstance(samples, (int, np.integer)):
        if int(samples) < 1:
            raise PreconditionError("need at least one sample", {"samples": int(samples)})
        s = np.linspace(tl, top, int(samples)) if top > tl else np.full(int(samples), tl)
    else:
        s = np.asarray(samples, dtype=float).reshape(-1)
        slack = WINDOW_SLACK * max(1.0, tc.T)
        if s.size == 0 or np.any(~np.isfinite(s)) or np.any(s < tl - slack) or np.any(s > top + slack):
            raise WindowError("samples must lie in [t_lambda, T - delta]", {"window": [tl, top]})

    lam, dt = tc.lam, tc.t1 - tc.t0
    r0, r1 = tc.rate(0), tc.rate(1)
    rho0, rho1 = np.asarray(rho(tc, 0, s)), np.asarray(rho(tc, 1, s))
    q0, q1 = (tc.T - tc.t0) / (tc.T - tl), (tc.T - tc.t1) / (tc.T - tl)

    lhs_a = float(np.max(np.abs(rho1 - rho0))) + abs(q1 - q0) + abs(np.sqrt(q1) - np.sqrt(q0))
    cd = c_delta(delta)
    cb = weighted_constant(tc, delta)
    lhs_b = lam * abs(1.0 - np.sqrt(q1)) + (1.0 - lam) * abs(1.0 - np.sqrt(q0))
    lhs_c = abs(lam * (1.0 - np.sqrt(q1)) + (1.0 - lam) * (1.0 - np.sqrt(q0)))

    d_left = lam * (1.0 - 1.0 / r1)
    d_mid = -(1.0 - lam) * (1.0 - 1.0 / r0)
    d_right = lam * (1.0 - lam) * dt / (tc.T - tl)
    d_err = max(abs(d_left - d_right), abs(d_mid - d_right))
    e_err = float(np.max(np.abs(lam * rho1 + (1.0 - lam) * rho0 - s)))

    checks = {
        "a": _bound(float(lhs_a), cd * abs(dt), cd),
        "b": _bound(float(lhs_b), cb * lam * (1.0 - lam) * abs(dt), cb),
        "c": _bound(float(lhs_c), lam * (1.0 - lam) * dt ** 2 / (8.0 * delta ** 2), 1.0 / (8.0 * delta ** 2)),
        "d": {**_exact(d_err, abs(d_right)), "left": d_left, "middle": d_mid, "right": d_right},
        "e": _exact(e_err, tc.T),
    }
    ok = all(c["ok"] for c in checks.values())
    if not ok:
        logger.warning("time change identities failed: %s", [k for k, c in checks.items() if not c["ok"]])
    return {
        "time_change": tc.to_dict(),
        "delta": delta,
        "window": [tl, top],
        "samples": int(s.size),
        "C_delta": cd,
        "checks": checks,
        "ok": ok,
    }
