"""Atomic CSV/JSON artifacts with self-describing headers."""
from __future__ import annotations

import io
import json
import os
import tempfile
from pathlib import Path

import numpy as np

__all__ = ["atomic_write", "write_csv", "read_csv", "write_json", "read_json"]


def atomic_write(path, text: str) -> Path:
    """Write ``text`` to a temporary file in the target directory, then rename it into place."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=path.parent, prefix=f".{path.name}.", suffix=".tmp")
    try:
        with os.fdopen(fd, "w", newline="\n") as fh:
            fh.write(text)
            fh.flush()
            os.fsync(fh.fileno())
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise
    return path


def write_csv(path, columns: dict, units: dict | None = None, comments=()) -> Path:
    """Columns of equal length, preceded by ``# name: unit`` lines.

    Values are printed with 17 significant digits so that reading the file
    back reproduces the doubles exactly.
    """
    units = units or {}
    names = list(columns)
    data = np.column_stack([np.asarray(columns[k], dtype=float) for k in names])
    buf = io.StringIO()
    for line in comments:
        buf.write(f"# {line}\n")
    for k in names:
        buf.write(f"# {k}: {units.get(k, '1')}\n")
    buf.write(",".join(names) + "\n")
    np.savetxt(buf, data, fmt="%.17g", delimiter=",")
    return atomic_write(path, buf.getvalue())


def read_csv(path) -> tuple[dict, dict]:
    """Return (columns, units) from a file written by :func:`write_csv`."""
    units, header = {}, None
    with open(path) as fh:
        lines = fh.readlines()
    start = 0
    for i, line in enumerate(lines):
        if line.startswith("#"):
            body = line[1:].strip()
            if ":" in body:
                k, u = body.split(":", 1)
                units[k.strip()] = u.strip()
            continue
        header = [h.strip() for h in line.strip().split(",")]
        start = i + 1
        break
    if header is None:
        raise ValueError(f"{path}: missing column header")
    rows = [ln for ln in lines[start:] if ln.strip()]
    data = np.loadtxt(rows, delimiter=",", ndmin=2) if rows else np.empty((0, len(header)))
    return {k: data[:, j] for j, k in enumerate(header)}, {k: units.get(k, "1") for k in header}


def write_json(path, obj) -> Path:
    return atomic_write(path, json.dumps(obj, indent=2, sort_keys=True, allow_nan=True) + "\n")


def read_json(path):
    with open(path) as fh:
        return json.load(fh)
