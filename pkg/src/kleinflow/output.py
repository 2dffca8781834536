"""CSV emission with provenance headers.

Files start with ``#`` comment lines (config digest, quadrature and
integrator settings), then a mandatory header row.  Floats are written
with 17 significant digits and lines end in LF, so identical inputs give
identical bytes.
"""
from __future__ import annotations

import numbers
from pathlib import Path

from . import __version__

TRAJECTORY_COLUMNS = ("traj_id", "x0", "x1")
DENSITY_COLUMNS = ("tau", "x1", "j0", "j1")
REPORT_COLUMNS = ("metric", "value")


def fmt(value) -> str:
    if isinstance(value, bool):
        return "1" if value else "0"
    if isinstance(value, numbers.Integral):
        return str(int(value))
    if isinstance(value, numbers.Real):
        return format(float(value), ".17g")
    return str(value)


def header_lines(digest: str, settings: dict) -> list[str]:
    lines = [f"# kleinflow {__version__}", f"# config_sha256={digest}"]
    for group in sorted(settings):
        items = " ".join(f"{k}={fmt(v)}" for k, v in sorted(settings[group].items()))
        lines.append(f"# {group}: {items}")
    return lines


def write_csv(path, columns, rows, digest: str, settings: dict) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    out = header_lines(digest, settings)
    out.append(",".join(columns))
    for row in rows:
        if len(row) != len(columns):
            raise ValueError(f"row {row!r} does not match columns {columns}")
        out.append(",".join(fmt(v) for v in row))
    with open(path, "w", newline="\n") as fh:
        fh.write("\n".join(out) + "\n")
    return path


def read_csv(path):
    """Return ``(comments, columns, rows)`` with values left as strings."""
    comments, rows, columns = [], [], None
    with open(path, newline="") as fh:
        for line in fh.read().split("\n"):
            if not line:
                continue
            if line.startswith("#"):
                comments.append(line)
            elif columns is None:
                columns = tuple(line.split(","))
            else:
                rows.append(tuple(line.split(",")))
    return comments, columns, rows
