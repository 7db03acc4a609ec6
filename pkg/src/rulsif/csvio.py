"""Minimal numeric CSV reading and writing for the command line."""

from __future__ import annotations

import math

import numpy as np

from .errors import DataError


def _parse_row(fields, lineno, path):
    out = []
    for f in fields:
        try:
            v = float(f)
        except ValueError:
            raise DataError(f"{path}:{lineno}: cannot parse {f.strip()!r} as a number") from None
        if not math.isfinite(v):
            raise DataError(f"{path}:{lineno}: non-finite value {f.strip()!r}")
        out.append(v)
    return out


def _looks_numeric(fields) -> bool:
    try:
        for f in fields:
            float(f)
    except ValueError:
        return False
    return True


def read_csv(path: str, header: str = "auto") -> np.ndarray:
    """Read a rectangular numeric table.

    ``header`` is ``"auto"`` (skip line 1 if it does not parse as numbers),
    ``"yes"`` or ``"no"``. Blank lines are ignored. Errors name the line.
    """
    if header not in ("auto", "yes", "no"):
        raise ValueError(f"header must be auto, yes or no, got {header!r}")
    try:
        with open(path, newline="") as fh:
            lines = fh.read().splitlines()
    except OSError as exc:
        raise DataError(f"{path}: {exc.strerror}") from None
    rows = []
    width = None
    first = True
    for lineno, line in enumerate(lines, start=1):
        if not line.strip():
            continue
        fields = line.split(",")
        if first:
            first = False
            if header == "yes" or (header == "auto" and not _looks_numeric(fields)):
                continue
        row = _parse_row(fields, lineno, path)
        if width is None:
            width = len(row)
        elif len(row) != width:
            raise DataError(f"{path}:{lineno}: expected {width} columns, found {len(row)}")
        rows.append(row)
    if not rows:
        raise DataError(f"{path}: no data rows")
    return np.array(rows, dtype=float)


def format_value(v) -> str:
    """Integers as integers, floats at full (round-trip) precision."""
    if isinstance(v, (bool, np.bool_)):
        return str(int(v))
    if isinstance(v, (int, np.integer)):
        return str(int(v))
    if isinstance(v, (float, np.floating)):
        return repr(float(v))
    return str(v)


def write_csv(target, rows, header=None) -> None:
    """Write ``rows`` to a path or an open text stream."""
    if hasattr(target, "write"):
        _write_rows(target, rows, header)
        return
    with open(target, "w", newline="") as fh:
        _write_rows(fh, rows, header)


def _write_rows(fh, rows, header):
    if header:
        fh.write(",".join(header) + "\n")
    for row in rows:
        fh.write(",".join(format_value(v) for v in row) + "\n")
