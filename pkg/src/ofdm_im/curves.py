"""Curve tables: the common output container for analytic and simulated curves.

A CurveTable is a label, a provenance tag, and equal-length named numeric
columns.  CSV emission is deterministic: metadata as '# key = value' comment
lines in sorted key order, then a header row, then data rows with floats
rendered by repr (shortest round-trip form), so reruns with identical inputs
produce byte-identical files.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Mapping, Sequence

_PROVENANCES = ("analytic", "simulated", "fitted")


@dataclass(frozen=True)
class CurveTable:
    label: str
    columns: dict[str, tuple[float, ...]]
    provenance: str
    meta: dict[str, object] = field(default_factory=dict)

    def __post_init__(self):
        if self.provenance not in _PROVENANCES:
            raise ValueError(
                f"provenance must be one of {_PROVENANCES}, got {self.provenance!r}")
        if not self.columns:
            raise ValueError("CurveTable needs at least one column")
        lengths = {len(v) for v in self.columns.values()}
        if len(lengths) != 1:
            raise ValueError(f"columns have unequal lengths: {lengths}")
        for name, col in self.columns.items():
            for v in col:
                if not math.isfinite(v):
                    raise ValueError(f"non-finite value in column {name!r}")

    def __len__(self) -> int:
        return len(next(iter(self.columns.values())))


def _format_value(v: object) -> str:
    if isinstance(v, float):
        return repr(v)
    return str(v)


def write_csv(table: CurveTable, path: str | Path,
              extra_meta: Mapping[str, object] | None = None) -> Path:
    """Write the table to CSV with deterministic bytes; returns the path."""
    path = Path(path)
    meta: dict[str, object] = {"label": table.label,
                               "provenance": table.provenance}
    meta.update(table.meta)
    if extra_meta:
        meta.update(extra_meta)
    names = list(table.columns.keys())
    cols = [table.columns[n] for n in names]
    lines = [f"# {k} = {_format_value(meta[k])}" for k in sorted(meta)]
    lines.append(",".join(names))
    for row in zip(*cols):
        lines.append(",".join(_format_value(v) for v in row))
    path.write_text("\n".join(lines) + "\n")
    return path


def column(values: Sequence[float]) -> tuple[float, ...]:
    """Normalize a numeric sequence into a float column."""
    return tuple(float(v) for v in values)
