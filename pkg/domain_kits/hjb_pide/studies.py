"""Box and refinement studies for the grid scheme, reported as JSON-ready dicts."""

from __future__ import annotations

import logging
import math
from typing import Callable, List, Optional, Sequence

import numpy as np

from domain_kits.forward_sim.grid import TimeGrid
from domain_kits.hjb_pide.scheme import PdeGrids, solve_obstacle_hjb, solve_penalized_hjb
from domain_kits.hjb_pide.surface import OBSTACLE, ValueSurface
from domain_kits.problem_model.spec import ProblemSpec

logger = logging.getLogger(__name__)

# errors below this are roundoff; no order is reported for them
ERROR_FLOOR = 1e-12


def _solve(spec, grids, mode, n, delta) -> ValueSurface:
    if mode == OBSTACLE:
        return solve_obstacle_hjb(spec, grids, delta)
    return solve_penalized_hjb(spec, grids, n, delta)


def observed_order(e_coarse: float, e_fine: float, ratio: float) -> Optional[float]:
    """log(e_coarse/e_fine)/log(ratio); None when either error is at roundoff."""
    if e_coarse <= ERROR_FLOOR or e_fine <= ERROR_FLOOR:
        return None
    return math.log(e_coarse / e_fine) / math.log(ratio)


def finest_error(errors: Sequence[Optional[float]]) -> Optional[float]:
    """Error of the finest level that has one."""
    known = [e for e in errors if e is not None]
    return known[-1] if known else None


def box_study(
    spec: ProblemSpec,
    grids: PdeGrids,
    probes: np.ndarray,
    mode: str = OBSTACLE,
    n: float = 0.0,
    delta: Optional[float] = None,
) -> dict:
    """Solve on the box and on the doubled box; compare W(t0, probes)."""
    probes = np.atleast_2d(np.asarray(probes, dtype=float))
    small = _solve(spec, grids, mode, n, delta)
    big = _solve(spec, PdeGrids(grids.time, grids.space.doubled()), mode, n, delta)
    t0 = grids.time.t0
    v_small = small.interpolate(t0, probes)
    v_big = big.interpolate(t0, probes)
    diff = float(np.max(np.abs(v_small - v_big)))
    logger.info("box study: max probe difference %.3e", diff)
    return {
        "box": grids.space.to_dict(),
        "doubled": grids.space.doubled().to_dict(),
        "probes": probes.tolist(),
        "values": v_small.tolist(),
        "values_doubled": v_big.tolist(),
        "max_diff": diff,
    }


def refinement_study(
    spec: ProblemSpec,
    grids: PdeGrids,
    probes: np.ndarray,
    levels: int = 3,
    mode: str = OBSTACLE,
    n: float = 0.0,
    delta: Optional[float] = None,
    reference: Optional[Callable[[float, np.ndarray], np.ndarray]] = None,
    space_factor: int = 2,
    time_factor: int = 4,
) -> dict:
    """Refine space by `space_factor` and time by `time_factor` per level.

    With `reference`, errors are max |W - reference| at the probes; without,
    successive differences between levels. Orders are in dt.
    """
    probes = np.atleast_2d(np.asarray(probes, dtype=float))
    t0 = grids.time.t0
    rows: List[dict] = []
    values = []
    g = grids
    for level in range(int(levels)):
        surf = _solve(spec, g, mode, n, delta)
        v = surf.interpolate(t0, probes)
        values.append(v)
        row = {"level": level, "time_steps": g.time.steps, "points": list(g.space.points),
               "dt": g.time.dt, "dx": g.space.spacing.tolist(), "values": v.tolist()}
        if reference is not None:
            row["error"] = float(np.max(np.abs(v - np.asarray(reference(t0, probes), dtype=float))))
        rows.append(row)
        g = PdeGrids(TimeGrid(g.time.t0, g.time.T, g.time.steps * time_factor),
                     g.space.refined(space_factor))
    if reference is None:
        for level in range(len(rows) - 1):
            rows[level]["error"] = float(np.max(np.abs(values[level] - values[level + 1])))
    errs = [r.get("error") for r in rows]
    orders = []
    for level in range(len(rows) - 1):
        e0, e1 = errs[level], errs[level + 1]
        if e0 is None or e1 is None:
            continue
        orders.append(observed_order(e0, e1, float(time_factor)))
    return {
        "mode": mode if mode == OBSTACLE else f"penalized(n={n:g})",
        "reference": reference is not None,
        "levels": rows,
        "orders": orders,
        "max_error_finest": finest_error(errs),
    }
