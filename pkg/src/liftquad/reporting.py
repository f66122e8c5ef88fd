"""CSV/JSON output helpers shared by the CLI commands.

Floats are written with %.17g so identical runs produce byte-identical data
files; each CSV gets a sidecar JSON with the run metadata (command, config,
ISO-8601 timestamp).
"""

from __future__ import annotations

import csv
import json
import sys
from datetime import datetime, timezone
from pathlib import Path


def fmt_value(v) -> str:
    if isinstance(v, (int,)) and not isinstance(v, bool):
        return str(v)
    return f"{float(v):.17g}"


def write_csv(path, header, rows) -> None:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(header if isinstance(header, list) else header.split(","))
        for row in rows:
            writer.writerow([fmt_value(v) for v in row])


def write_sidecar(csv_path, meta: dict) -> None:
    csv_path = Path(csv_path)
    doc = {
        "created": datetime.now(timezone.utc).isoformat(),
        "command": " ".join(sys.argv),
        **meta,
    }
    with open(csv_path.with_suffix(csv_path.suffix + ".meta.json"), "w") as fh:
        json.dump(doc, fh, indent=2, default=_coerce)
        fh.write("\n")


def write_json(path, doc: dict) -> None:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w") as fh:
        json.dump(doc, fh, indent=2, default=_coerce)
        fh.write("\n")


def _coerce(obj):
    try:
        import numpy as np

        if isinstance(obj, np.ndarray):
            return obj.tolist()
        if isinstance(obj, (np.floating, np.integer)):
            return obj.item()
        if isinstance(obj, np.bool_):
            return bool(obj)
    except ImportError:
        pass
    raise TypeError(f"not JSON serializable: {type(obj)}")
