from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Any, Dict, List, Optional, Tuple

RULE_TYPES = ("exists", "type_is", "eq", "approx", "range", "max", "min")


@dataclass(frozen=True)
class CheckResult:
    rule_id: str
    ok: bool
    message: str
    path: Optional[str] = None
    value: Optional[float] = None
    limit: Optional[float] = None


def _split_path(path: str) -> List[str]:
    return [p for p in (path or "").split(".") if p]


def _get_path_value(obj: Any, path: str) -> Tuple[bool, Any]:
    """Return (found, value) for dotted dict paths; dict traversal only."""
    cur = obj
    for key in _split_path(path):
        if not isinstance(cur, dict) or key not in cur:
            return False, None
        cur = cur[key]
    return True, cur


def _type_name(value: Any) -> str:
    if value is None:
        return "null"
    if isinstance(value, bool):
        return "boolean"
    if isinstance(value, (int, float)):
        return "number"
    if isinstance(value, str):
        return "string"
    if isinstance(value, list):
        return "array"
    if isinstance(value, dict):
        return "object"
    return "unknown"


def _safe_float(value: Any) -> Optional[float]:
    if isinstance(value, bool):
        return None
    try:
        out = float(value)
    except (TypeError, ValueError):
        return None
    return out


def _limit(rule: Dict[str, Any], metrics: Dict[str, Any], key: str) -> Tuple[Optional[float], Optional[str]]:
    """Bound from `key` (a literal) or `key`_path (another metric); (None, message) on failure."""
    path_key = f"{key}_path"
    if path_key in rule:
        found, raw = _get_path_value(metrics, str(rule[path_key]))
        if not found:
            return None, "limit_missing"
        lim = _safe_float(raw)
        if lim is None or math.isnan(lim):
            return None, "limit_not_numeric"
        return lim, None
    if key in rule and rule[key] is not None:
        lim = _safe_float(rule[key])
        if lim is None or math.isnan(lim):
            return None, "limit_not_numeric"
        return lim, None
    return None, None


def _numeric(metrics: Dict[str, Any], path: str) -> Tuple[Optional[float], Optional[str]]:
    found, raw = _get_path_value(metrics, path)
    if not found:
        return None, "missing"
    value = _safe_float(raw)
    if value is None:
        return None, "not_numeric"
    if not math.isfinite(value):
        return None, "not_finite"
    return value, None


def _check(rule: Dict[str, Any], rule_id: str, metrics: Dict[str, Any],
           baseline: Dict[str, Any]) -> CheckResult:
    rule_type = str(rule.get("type") or "").strip().lower()
    path = str(rule.get("path") or "")

    if rule_type == "exists":
        found, _ = _get_path_value(metrics, path)
        return CheckResult(rule_id, bool(found), "exists" if found else "missing", path)

    if rule_type == "type_is":
        expected = str(rule.get("expected") or "")
        found, value = _get_path_value(metrics, path)
        if not found:
            return CheckResult(rule_id, False, "missing", path)
        actual = _type_name(value)
        ok = actual == expected
        return CheckResult(rule_id, ok, f"type={actual}" if ok else f"type_mismatch expected={expected} got={actual}", path)

    if rule_type == "eq":
        found, value = _get_path_value(metrics, path)
        if not found:
            return CheckResult(rule_id, False, "missing", path)
        if "baseline_path" in rule:
            found_b, base = _get_path_value(baseline, str(rule["baseline_path"]))
            if not found_b:
                return CheckResult(rule_id, False, "baseline_missing", path)
            ok = value == base
            return CheckResult(rule_id, ok, "eq_baseline" if ok else "neq_baseline", path)
        if "value" in rule:
            ok = value == rule["value"]
            return CheckResult(rule_id, ok, "eq_value" if ok else "neq_value", path)
        return CheckResult(rule_id, False, "eq_missing_comparator", path)

    if rule_type == "approx":
        value, err = _numeric(metrics, path)
        if err:
            return CheckResult(rule_id, False, err, path)
        abs_tol = float(rule.get("abs_tol") or 0.0)
        rel_tol = float(rule.get("rel_tol") or 0.0)
        if "baseline_path" in rule:
            target, err = _numeric(baseline, str(rule["baseline_path"]))
            if err:
                return CheckResult(rule_id, False, f"baseline_{err}", path, value)
        elif "value_path" in rule:
            target, err = _numeric(metrics, str(rule["value_path"]))
            if err:
                return CheckResult(rule_id, False, f"target_{err}", path, value)
        elif "value" in rule:
            target = _safe_float(rule["value"])
            if target is None:
                return CheckResult(rule_id, False, "target_not_numeric", path, value)
        else:
            return CheckResult(rule_id, False, "approx_missing_comparator", path, value)
        diff = abs(value - target)
        ok = diff <= abs_tol or diff / max(abs(target), 1e-12) <= rel_tol
        return CheckResult(rule_id, ok, "approx" if ok else "drift_exceeded", path, value, target)

    if rule_type in ("range", "max", "min"):
        value, err = _numeric(metrics, path)
        if err:
            return CheckResult(rule_id, False, err, path)
        if rule_type == "range":
            lo, err_lo = _limit(rule, metrics, "min")
            hi, err_hi = _limit(rule, metrics, "max")
            if err_lo or err_hi:
                return CheckResult(rule_id, False, err_lo or err_hi, path, value)
            ok = (lo is None or value >= lo) and (hi is None or value <= hi)
            return CheckResult(rule_id, ok, "in_range" if ok else "out_of_range", path, value, hi if hi is not None else lo)
        lim, err = _limit(rule, metrics, "value")
        if err or lim is None:
            return CheckResult(rule_id, False, err or "limit_missing", path, value)
        ok = value <= lim if rule_type == "max" else value >= lim
        label = "at_most" if rule_type == "max" else "at_least"
        return CheckResult(rule_id, ok, label if ok else f"not_{label}", path, value, lim)

    return CheckResult(rule_id, False, f"unknown_rule_type:{rule_type}")


def evaluate_contract(
    *,
    metrics: Dict[str, Any],
    contract: Dict[str, Any],
    baseline: Optional[Dict[str, Any]] = None,
) -> Dict[str, Any]:
    """Evaluate a metric dictionary against an acceptance contract.

    Contract format:

    {
      "rules": [
        {"id": "gap", "type": "max", "path": "tree.max_gap", "value": 1e-10},
        {"id": "ladder", "type": "max", "path": "ladder.max_increase", "value_path": "ladder.tolerance"},
        {"id": "order", "type": "min", "path": "heat.min_order", "value": 0.9},
        {"id": "weight", "type": "range", "path": "kulik.z_weight", "min": -4, "max": 4},
        {"id": "same", "type": "eq", "path": "determinism.identical", "value": true},
        {"id": "y0", "type": "approx", "path": "tree.y0", "value": 0.5, "abs_tol": 1e-10}
      ]
    }

    Limits are literals or, through `value_path` / `min_path` / `max_path`,
    other entries of the same metric dictionary. Missing and non-finite values fail.
    """
    baseline = baseline or {}
    rules = contract.get("rules") or []
    if not isinstance(rules, list):
        rules = []

    results: List[CheckResult] = []
    for idx, rule in enumerate(rules):
        if not isinstance(rule, dict):
            results.append(CheckResult(f"rule_{idx}", False, "Invalid rule (not an object)"))
            continue
        rule_id = str(rule.get("id") or f"rule_{idx}")
        try:
            results.append(_check(rule, rule_id, metrics, baseline))
        except (TypeError, ValueError, KeyError):
            results.append(CheckResult(rule_id, False, "rule_error", rule.get("path")))

    total = len(results)
    failed = [r for r in results if not r.ok]
    return {
        "total_checks": total,
        "failed_checks": len(failed),
        "pass_rate": 0.0 if total == 0 else (total - len(failed)) / total,
        "checks": [
            {"id": r.rule_id, "ok": r.ok, "path": r.path, "message": r.message, "value": r.value, "limit": r.limit}
            for r in results
        ],
    }
