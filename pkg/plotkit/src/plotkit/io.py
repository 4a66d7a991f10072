"""CSV reading for the campaign outputs: comment-block metadata + schema checks."""
from __future__ import annotations

from pathlib import Path

import numpy as np


class SchemaError(ValueError):
    """Input file does not match the documented campaign schema."""


class EmptyInputError(ValueError):
    """Input file has no data rows."""


def read_table(path) -> tuple[dict, dict]:
    """Parse a campaign CSV into ({column -> array}, metadata).

    The leading '#' comment block carries 'key: value' metadata (notably
    manifest_hash).  Numeric columns become float arrays; anything else
    stays as an object array of strings.
    """
    path = Path(path)
    if not path.exists():
        raise SchemaError(f"input file not found: {path}")
    meta = {}
    header = None
    rows = []
    with open(path) as fh:
        for line in fh:
            line = line.rstrip("\n")
            if not line:
                continue
            if line.startswith("#"):
                body = line.lstrip("#").strip()
                if ":" in body:
                    key, val = body.split(":", 1)
                    meta[key.strip()] = val.strip()
                continue
            if header is None:
                header = [h.strip() for h in line.split(",")]
                continue
            rows.append(line.split(","))
    if header is None:
        raise EmptyInputError(f"{path} has no header row")
    if not rows:
        raise EmptyInputError(f"{path} has no data rows")
    columns = {}
    for i, name in enumerate(header):
        raw = [r[i] if i < len(r) else "" for r in rows]
        try:
            columns[name] = np.array([float(x) for x in raw])
        except ValueError:
            columns[name] = np.array(raw, dtype=object)
    return columns, meta


def require_columns(columns: dict, needed, path="") -> None:
    missing = [c for c in needed if c not in columns]
    if missing:
        raise SchemaError(
            f"{path}: missing columns {missing}; expected header to contain "
            f"{','.join(needed)}")
