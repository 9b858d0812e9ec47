"""Delimited result files, JSON mirrors, and run manifests.

CSV with fixed headers is the canonical result format. Floats are
written with repr (shortest round-trip form) and rows in generation
order, so identical configurations produce byte-identical files no
matter how many worker threads computed them. Wall-clock data lives
only in the manifest, which is deliberately excluded from that
guarantee.
"""

from __future__ import annotations

import csv
import io
import json
import platform
import time
from pathlib import Path

import numpy as np

__all__ = [
    "format_value",
    "write_csv",
    "write_json_mirror",
    "write_manifest",
    "read_csv",
    "PREDICTION_HEADER",
    "OUTCOME_HEADER",
    "CRITERIA_HEADER",
]

PREDICTION_HEADER = (
    "conclusion_id",
    "N",
    "M",
    "trials",
    "predicted",
    "mean",
    "std",
    "rel_err",
    "seed",
)

OUTCOME_HEADER = (
    "trial",
    "phi_basic",
    "phi_sup",
    "gap",
    "residual_basic",
    "residual_sup",
    "iters_basic",
    "iters_sup",
    "valid",
)

CRITERIA_HEADER = ("criterion", "description", "passed", "detail")


def format_value(x) -> str:
    """Canonical text form for one CSV cell."""
    if x is None:
        return ""
    if isinstance(x, str):
        return x
    if isinstance(x, (bool, np.bool_)):
        return "true" if x else "false"
    if isinstance(x, (int, np.integer)):
        return str(int(x))
    if isinstance(x, (float, np.floating)):
        return repr(float(x))
    raise TypeError(f"cannot format {type(x).__name__} for CSV output")


def write_csv(path, header, rows) -> Path:
    """Write a table with fixed line endings and canonical cell text."""
    path = Path(path)
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(list(header))
    for row in rows:
        if len(row) != len(header):
            raise ValueError(
                f"row width {len(row)} does not match header width {len(header)}"
            )
        writer.writerow([format_value(v) for v in row])
    path.write_text(buf.getvalue(), encoding="utf-8", newline="")
    return path


def write_json_mirror(path, header, rows) -> Path:
    """Machine-readable mirror of a CSV table (list of records)."""
    path = Path(path)
    header = list(header)
    records = []
    for row in rows:
        rec = {}
        for key, val in zip(header, row):
            if isinstance(val, (np.integer,)):
                val = int(val)
            elif isinstance(val, (np.floating,)):
                val = float(val)
            elif isinstance(val, np.bool_):
                val = bool(val)
            rec[key] = val
        records.append(rec)
    text = json.dumps(records, indent=2, sort_keys=False)
    path.write_text(text + "\n", encoding="utf-8", newline="")
    return path


def write_manifest(
    path,
    suite: str,
    config: dict,
    seed: int,
    threads: int,
    wall_time_s: float,
    outputs=(),
    timings=None,
) -> Path:
    """Record everything needed to reproduce the files next to it."""
    from . import __version__

    path = Path(path)
    payload = {
        "suite": suite,
        "config": config,
        "seed": int(seed),
        "threads": int(threads),
        "wall_time_s": float(wall_time_s),
        "timings": {k: float(v) for k, v in (timings or {}).items()},
        "outputs": [str(o) for o in outputs],
        "versions": {
            "supercon": __version__,
            "numpy": np.__version__,
            "python": platform.python_version(),
        },
        "created_unix": int(time.time()),
    }
    path.write_text(
        json.dumps(payload, indent=2, sort_keys=False) + "\n",
        encoding="utf-8",
        newline="",
    )
    return path


def read_csv(path):
    """Read a delimited table back as (header, rows-of-strings)."""
    with open(path, newline="", encoding="utf-8") as f:
        reader = csv.reader(f)
        try:
            header = next(reader)
        except StopIteration:
            return [], []
        return header, [row for row in reader]
