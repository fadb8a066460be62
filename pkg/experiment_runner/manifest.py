"""Artifact manifest: content hashes per file, plus optional HMAC signing.

- Signing uses HMAC-SHA256 keyed by `RSCLAB_MANIFEST_SIGNING_KEY`.
- If no key is configured, signing is simply skipped.
- The manifest carries no timestamps, so identical runs give identical bytes.
"""

from __future__ import annotations

import hashlib
import hmac
import json
from pathlib import Path
from typing import Any, Dict, Iterable, List, Optional

from experiment_runner.artifacts import dumps

MANIFEST_NAME = "manifest.json"
SCHEMA_VERSION = "1.0"
SIGNATURE_ALG = "hmac-sha256"


def file_digest(path) -> str:
    h = hashlib.sha256()
    with open(path, "rb") as fh:
        for chunk in iter(lambda: fh.read(1 << 16), b""):
            h.update(chunk)
    return "sha256:" + h.hexdigest()


def _canonical_json(payload: Dict[str, Any]) -> bytes:
    body = {k: v for k, v in payload.items() if k not in ("signature_alg", "signature")}
    return json.dumps(body, sort_keys=True, separators=(",", ":"), default=str).encode("utf-8")


def build_manifest(out_dir, files: Iterable[str], config_hash: str, seed: int,
                   extra: Optional[Dict[str, Any]] = None) -> Dict[str, Any]:
    """One entry per file with its sha256 and size, sorted by path."""
    root = Path(out_dir)
    entries: List[Dict[str, Any]] = []
    for rel in sorted(set(f for f in files if f)):
        path = root / rel
        entries.append({"path": rel, "sha256": file_digest(path), "bytes": path.stat().st_size})
    manifest = {
        "schema_version": SCHEMA_VERSION,
        "config_hash": config_hash,
        "seed": int(seed),
        "artifacts": entries,
    }
    if extra:
        manifest.update(extra)
    return manifest


def sign_manifest(manifest: Dict[str, Any], key: Optional[bytes]) -> Dict[str, Any]:
    """Attach (signature_alg, signature) when a key is configured."""
    if not key:
        return manifest
    digest = hmac.new(key, _canonical_json(manifest), hashlib.sha256).hexdigest()
    return {**manifest, "signature_alg": SIGNATURE_ALG, "signature": digest}


def verify_signature(manifest: Dict[str, Any], key: Optional[bytes]) -> bool:
    if not key:
        return False
    alg = str(manifest.get("signature_alg") or "").strip().lower()
    provided = str(manifest.get("signature") or "").strip().lower()
    if alg != SIGNATURE_ALG or not provided:
        return False
    expected = hmac.new(key, _canonical_json(manifest), hashlib.sha256).hexdigest().lower()
    return hmac.compare_digest(expected, provided)


def write_manifest(out_dir, manifest: Dict[str, Any]) -> Path:
    path = Path(out_dir) / MANIFEST_NAME
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_bytes(dumps(manifest).encode("utf-8"))
    return path


def check_manifest(out_dir, manifest: Dict[str, Any]) -> Dict[str, Any]:
    """Compare listed hashes with the files on disk and look for unlisted files."""
    root = Path(out_dir)
    listed = {e["path"]: e["sha256"] for e in manifest.get("artifacts", [])}
    missing, changed = [], []
    for rel, digest in listed.items():
        path = root / rel
        if not path.is_file():
            missing.append(rel)
        elif file_digest(path) != digest:
            changed.append(rel)
    on_disk = {p.relative_to(root).as_posix() for p in root.rglob("*") if p.is_file()}
    unlisted = sorted(on_disk - set(listed) - {MANIFEST_NAME})
    return {"complete": not (missing or changed or unlisted), "missing": missing,
            "changed": changed, "unlisted": unlisted}
