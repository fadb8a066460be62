"""Client-style smoke test of the batch CLI.

- Runs one suite from a bundled config into a temporary directory
- Checks the exit code, summary.json, and that manifest.json lists every file

Env vars:
- RSCLAB_SMOKE_CONFIG (default templates/configs/trivial_zero.yaml)
- RSCLAB_SMOKE_SUITE (default trivial-zero)

Exit codes:
- 0: run passed and the manifest is complete
- 1: error
"""

from __future__ import annotations

import json
import os
import sys
import tempfile
from pathlib import Path

repo_root = Path(__file__).resolve().parents[2]
if str(repo_root) not in sys.path:
    sys.path.insert(0, str(repo_root))

from experiment_runner.cli import main as cli_main
from experiment_runner.manifest import MANIFEST_NAME, check_manifest


def main() -> int:
    config = os.getenv("RSCLAB_SMOKE_CONFIG") or str(repo_root / "templates" / "configs" / "trivial_zero.yaml")
    suite = os.getenv("RSCLAB_SMOKE_SUITE") or "trivial-zero"

    with tempfile.TemporaryDirectory() as out:
        code = cli_main(["run", "--config", config, "--out", out, "--suite", suite])
        summary_path = Path(out) / "summary.json"
        summary = json.loads(summary_path.read_text(encoding="utf-8")) if summary_path.is_file() else {}
        manifest_path = Path(out) / MANIFEST_NAME
        manifest = json.loads(manifest_path.read_text(encoding="utf-8")) if manifest_path.is_file() else {}
        listing = check_manifest(out, manifest) if manifest else {"complete": False}

    print(json.dumps({"exit_code": code, "status": summary.get("status"),
                      "config_hash": summary.get("config_hash"), "manifest_complete": listing["complete"]},
                     indent=2))

    if code != 0:
        print(f"ERROR: exit code {code}", file=sys.stderr)
        return 1
    if summary.get("status") != "passed":
        print("ERROR: summary status != passed", file=sys.stderr)
        return 1
    if not listing["complete"]:
        print(f"ERROR: manifest incomplete: {listing}", file=sys.stderr)
        return 1
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
