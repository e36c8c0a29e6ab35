"""Deterministic file output: fixed-schema CSVs and the run manifest.

Every data file is byte-reproducible: floats are written with their
shortest round-trip decimal representation (Python repr), line endings
are LF, and timestamps are confined to manifest.json, which is written
last so its presence marks a complete run.
"""
from __future__ import annotations

from datetime import datetime, timezone
import csv
import hashlib
import json
from pathlib import Path

SCHEMAS = {
    "gradients": ("n", "L", "component", "variance"),
    "norms": ("n", "L", "norm_mean", "norm_q1", "norm_q3", "bound"),
    "trajectory": ("tau", "loss", "error", "fidelity", "grad_norm", "lr"),
    "ensemble": ("run_id", "seed", "final_error", "best_tau", "bound_met"),
    "hessian": ("rank", "eigenvalue"),
    "projection": ("tau", "projected_distance", "error"),
    "express": ("target_id", "min_distance"),
    "spectrum": ("rank", "eigenvalue"),
    "trh2": ("n", "trace_h2"),
}


def format_cell(value) -> str:
    """Canonical text for one CSV cell; None renders as empty."""
    if value is None:
        return ""
    if hasattr(value, "item"):  # numpy scalar -> the native Python value
        value = value.item()
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, float):
        return repr(value)
    return str(value)


def write_csv(path, schema: str, rows) -> Path:
    """Write rows (sequences matching the schema column count) as CSV."""
    if schema not in SCHEMAS:
        raise ValueError(f"unknown schema {schema!r}; know {sorted(SCHEMAS)}")
    columns = SCHEMAS[schema]
    path = Path(path)
    with open(path, "w", encoding="utf-8", newline="") as f:
        w = csv.writer(f, lineterminator="\n")
        w.writerow(columns)
        for row in rows:
            if len(row) != len(columns):
                raise ValueError(
                    f"row {row!r} has {len(row)} cells, schema "
                    f"{schema!r} needs {len(columns)}"
                )
            w.writerow([format_cell(v) for v in row])
    return path


def _parse_cell(text: str):
    if text == "":
        return None
    if text == "true":
        return True
    if text == "false":
        return False
    try:
        return int(text)
    except ValueError:
        pass
    try:
        return float(text)
    except ValueError:
        return text


def read_csv(path) -> tuple[tuple[str, ...], list[list]]:
    """Inverse of write_csv: (header, typed rows)."""
    with open(path, encoding="utf-8", newline="") as f:
        reader = csv.reader(f)
        header = tuple(next(reader))
        rows = [[_parse_cell(c) for c in row] for row in reader]
    return header, rows


def sha256_file(path) -> str:
    h = hashlib.sha256()
    with open(path, "rb") as f:
        for chunk in iter(lambda: f.read(1 << 16), b""):
            h.update(chunk)
    return h.hexdigest()


def utc_now() -> str:
    return datetime.now(timezone.utc).isoformat(timespec="seconds")


def write_json(path, payload: dict) -> Path:
    path = Path(path)
    with open(path, "w", encoding="utf-8", newline="") as f:
        json.dump(payload, f, indent=1, sort_keys=True)
        f.write("\n")
    return path


def write_manifest(
    out_dir,
    config: dict,
    summary: dict,
    files,
    warnings: list[str],
    started: str,
    version: str,
) -> Path:
    """Assemble manifest.json from the finished run directory.

    files is the list of artifact paths (relative names resolved under
    out_dir); each gets a sha256 checksum.  Must be called after every
    other file has been written.
    """
    out_dir = Path(out_dir)
    checksums = {}
    for name in sorted(str(f) for f in files):
        checksums[name] = sha256_file(out_dir / name)
    payload = {
        "artifact_version": version,
        "config": config,
        "summary": summary,
        "checksums": checksums,
        "warnings": warnings,
        "started": started,
        "finished": utc_now(),
    }
    return write_json(out_dir / "manifest.json", payload)
