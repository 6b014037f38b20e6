"""Stable text outputs: CSV / JSON-lines tables and run manifests.

Schemas:

* scan rows ``L,p,seed,observable,t,value`` (monitored and purification runs;
  scalar observables such as ``t_p`` use ``t = 0``);
* correlation rows ``L,realization,t,site,value`` (``realization = -1`` marks
  the exact reference);
* sample rows ``bitstring,count``.

Floats are written with 17 significant digits, ``inf`` and ``nan`` literally.
"""
from __future__ import annotations

import csv
import hashlib
import json
import platform
import time
from importlib import metadata
from pathlib import Path
from typing import Iterable, Sequence

import numpy as np

__all__ = [
    "SCAN_HEADER",
    "CORRELATION_HEADER",
    "SAMPLE_HEADER",
    "fmt",
    "write_table",
    "read_table",
    "write_json",
    "write_manifest",
    "code_version",
]

SCAN_HEADER = ("L", "p", "seed", "observable", "t", "value")
CORRELATION_HEADER = ("L", "realization", "t", "site", "value")
SAMPLE_HEADER = ("bitstring", "count")


def fmt(v) -> str:
    if isinstance(v, (bool, np.bool_)):
        return str(int(v))
    if isinstance(v, (int, np.integer)):
        return str(int(v))
    if isinstance(v, (float, np.floating)):
        x = float(v)
        if np.isnan(x):
            return "nan"
        if np.isinf(x):
            return "inf" if x > 0 else "-inf"
        if x.is_integer() and abs(x) < 1e15:
            return str(int(x))
        return f"{x:.17g}"
    return str(v)


def write_table(path: Path, header: Sequence[str], rows: Iterable[Sequence], fmt_kind: str = "csv") -> Path:
    """Write rows as CSV (``fmt_kind='csv'``) or JSON lines (``'jsonl'``)."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    if fmt_kind == "csv":
        with open(path, "w", newline="") as fh:
            w = csv.writer(fh, lineterminator="\n")
            w.writerow(header)
            for r in rows:
                w.writerow([fmt(v) for v in r])
    elif fmt_kind == "jsonl":
        with open(path, "w") as fh:
            for r in rows:
                rec = {k: _json_value(fmt(v)) for k, v in zip(header, r)}
                fh.write(json.dumps(rec, sort_keys=False) + "\n")
    else:
        raise ValueError("format must be 'csv' or 'jsonl'")
    return path


def _json_value(s: str):
    try:
        return int(s)
    except ValueError:
        pass
    try:
        return float(s)
    except ValueError:
        return s


def read_table(path: Path) -> list[dict]:
    """Read a CSV or JSON-lines table into dicts with numeric fields parsed."""
    path = Path(path)
    if path.suffix == ".jsonl":
        with open(path) as fh:
            return [{k: _json_value(str(v)) for k, v in json.loads(ln).items()} for ln in fh if ln.strip()]
    with open(path, newline="") as fh:
        return [{k: _json_value(v) for k, v in row.items()} for row in csv.DictReader(fh)]


def _default(o):
    if isinstance(o, np.ndarray):
        return o.tolist()
    if isinstance(o, (np.integer,)):
        return int(o)
    if isinstance(o, (np.floating,)):
        return float(o)
    if isinstance(o, Path):
        return str(o)
    raise TypeError(f"not serializable: {type(o)}")


def write_json(path: Path, obj) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(json.dumps(obj, indent=2, sort_keys=True, default=_default) + "\n")
    return path


def code_version() -> str:
    try:
        return metadata.version("artifact")
    except metadata.PackageNotFoundError:
        return "unknown"


def _sha256(path: Path) -> str:
    return hashlib.sha256(Path(path).read_bytes()).hexdigest()


def write_manifest(out_dir: Path, command: str, config: dict, files: Sequence[Path]) -> Path:
    """Record everything needed to regenerate ``files``: command, resolved config, versions, hashes."""
    out_dir = Path(out_dir)
    manifest = {
        "command": command,
        "config": config,
        "code_version": code_version(),
        "python": platform.python_version(),
        "numpy": np.__version__,
        "files": {Path(f).name: _sha256(f) for f in files},
        "timestamp": time.strftime("%Y-%m-%dT%H:%M:%S%z"),
    }
    return write_json(out_dir / f"manifest_{command}.json", manifest)
