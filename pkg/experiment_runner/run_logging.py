"""
Run logging.

configure_logging() sets up the root logger once and tags every record with
the current run id. RunLogger writes one JSON object per event, with
secrets redacted. Nothing logged here ends up in an artifact.
"""

import json
import logging
import re
import uuid
from contextvars import ContextVar
from typing import Any, Dict, Optional

# Context var for run_id (used in logging)
run_id_ctx: ContextVar[str] = ContextVar("run_id", default="-")


class RunIdFilter(logging.Filter):
    def filter(self, record):
        record.run_id = run_id_ctx.get()
        return True


def configure_logging(level: str = "INFO") -> None:
    root_logger = logging.getLogger()
    if not root_logger.handlers:
        logging.basicConfig(level=getattr(logging, str(level).upper(), logging.INFO),
                            format="[%(run_id)s] %(message)s")
    else:
        root_logger.setLevel(getattr(logging, str(level).upper(), logging.INFO))
    for handler in logging.root.handlers:
        if not any(isinstance(f, RunIdFilter) for f in handler.filters):
            handler.addFilter(RunIdFilter())


def new_run_id() -> str:
    return f"run_{uuid.uuid4().hex[:12]}"


class RunLogger:
    """Structured event logger with redaction rules."""

    # Patterns to redact (secrets only; runs carry no personal data)
    REDACTION_PATTERNS = {
        "signing_key": r"(?i)(signing_key|RSCLAB_MANIFEST_SIGNING_KEY)[:\s=\"]+[^\s,}]+",
        "token": r"(?i)(token|secret|password)[:\s=\"]+[^\s,}]+",
    }

    def __init__(self, name: str = "rsclab.run", secrets: Optional[list] = None, enable_redaction: bool = True):
        self.logger = logging.getLogger(name)
        self.enable_redaction = enable_redaction
        self.secrets = [s for s in (secrets or []) if s]

    def redact(self, text: str) -> str:
        if not self.enable_redaction or not isinstance(text, str):
            return text
        result = text
        for secret in self.secrets:
            result = result.replace(secret, "[REDACTED_SECRET]")
        for pattern_name, pattern in self.REDACTION_PATTERNS.items():
            result = re.sub(pattern, f"[REDACTED_{pattern_name.upper()}]", result)
        return result

    def create_entry(
        self,
        event: str,
        suite: Optional[str] = None,
        status: Optional[str] = None,
        latency_ms: Optional[float] = None,
        config_hash: Optional[str] = None,
        error_code: Optional[str] = None,
        **extra: Any,
    ) -> Dict[str, Any]:
        entry = {
            "event": event,
            "run_id": run_id_ctx.get(),
            "suite": suite,
            "status": status,
            "latency_ms": None if latency_ms is None else round(float(latency_ms), 3),
            "config_hash": config_hash,
            "error_code": error_code,
        }
        entry.update(extra)
        return entry

    def log_entry(self, entry: Dict[str, Any], level: int = logging.INFO) -> None:
        redacted = {k: self.redact(v) if isinstance(v, str) else v for k, v in entry.items()}
        self.logger.log(level, json.dumps(redacted, sort_keys=True, default=str))

    def event(self, event: str, **fields: Any) -> Dict[str, Any]:
        entry = self.create_entry(event, **fields)
        failed = fields.get("status") in ("failed", "error")
        self.log_entry(entry, logging.WARNING if failed else logging.INFO)
        return entry
