"""Time-change relations on random configurations, and the change-of-measure weight for the jump measure."""

from __future__ import annotations

import numpy as np
import pandas as pd

from domain_kits.forward_sim.rng import CHANNEL_KULIK, stream
from domain_kits.kulik import TimeChange, identity_suite, weight_check
from experiment_runner import problems
from experiment_runner.suites.base import SuiteContext, SuiteOutcome

SAMPLES = 16
MAX_TIGHT_DELTA = 0.25
DEFAULT_NU_MASS = 3.0


def _configs(seed: int, count: int, T: float):
    """Even rows keep both starts below T - 2 delta, odd rows use the full window."""
    u = stream(seed, CHANNEL_KULIK, 1).random((count, 4))
    out = []
    for j, (a, b, lam, d) in enumerate(u):
        if j % 2 == 0:
            delta = min(MAX_TIGHT_DELTA, 0.25 * T) * (0.04 + 0.96 * d)
            top = T - 2.0 * delta
        else:
            delta = T * (0.01 + 0.49 * d)
            top = T - delta
        out.append((TimeChange(a * top, b * top, lam, T), delta, j % 2 == 0))
    return out


def run(ctx: SuiteContext) -> SuiteOutcome:
    cfg = ctx.config
    T = cfg.problem.horizon
    tol = cfg.solver.tolerances

    rows = []
    for tc, delta, tight in _configs(ctx.seed, cfg.solver.kulik_configs, T):
        rep = identity_suite(tc, delta, samples=SAMPLES)
        constant = rep["checks"]["b"]["constant"]
        rows.append({
            **tc.to_dict(),
            "delta": delta,
            "tight": tight,
            "ok": rep["ok"],
            "constant_b": constant,
            "constant_ok": (not tight) or constant == 0.5 / delta,
            **{f"{k}_ok": c["ok"] for k, c in rep["checks"].items()},
        })
    identities = pd.DataFrame(rows)

    measure, _ = problems.levy_from_config(cfg.levy)
    nu_mass = measure.total_mass if measure.total_mass > 0.0 else DEFAULT_NU_MASS
    tc = TimeChange(0.0, 0.5 * T, 0.5, T)
    weights = []
    for i in (0, 1):
        chk = weight_check(tc, i, nu_mass, n_samples=cfg.solver.kulik_draws, seed=ctx.seed)
        z_weight = abs(chk["mean_weight"] - 1.0) / max(chk["weight_stderr"], 1e-300)
        z_count = abs(chk["reweighted_count"] - chk["expected_count"]) / max(chk["count_stderr"], 1e-300)
        weights.append({"i": i, **chk, "z_weight": z_weight, "z_count": z_count})
    weight_table = pd.DataFrame(weights)

    metrics = {
        "configs": len(rows),
        "tight_configs": int(identities["tight"].sum()),
        "failures": int((~identities["ok"]).sum()),
        "constant_failures": int((~identities["constant_ok"]).sum()),
        "nu_mass": nu_mass,
        "max_weight_z": float(np.max(weight_table[["z_weight", "z_count"]].to_numpy())),
        "weight_z_limit": tol.kulik_stderr,
    }
    rules = [
        {"id": "kulik-identities", "type": "max", "path": "failures", "value": 0},
        {"id": "kulik-tight-constant", "type": "max", "path": "constant_failures", "value": 0},
        {"id": "kulik-weight", "type": "max", "path": "max_weight_z", "value_path": "weight_z_limit"},
    ]
    return SuiteOutcome(
        metrics=metrics,
        rules=rules,
        tables={"identities": identities, "weight": weight_table},
    )
