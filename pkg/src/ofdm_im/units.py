"""Centralized dB/linear conversions.

Public interfaces take dB; all math runs on linear scale.
"""
from __future__ import annotations

import math


def db_to_linear(db: float) -> float:
    return 10.0 ** (db / 10.0)


def linear_to_db(x: float) -> float:
    if x <= 0:
        raise ValueError(f"linear value must be > 0 to convert to dB, got {x}")
    return 10.0 * math.log10(x)


def db_grid(start: float, stop: float, step: float) -> tuple[float, ...]:
    """Inclusive dB grid start, start+step, ..., up to stop (tolerant endpoint)."""
    if step <= 0:
        raise ValueError(f"step must be > 0, got {step}")
    if stop < start:
        raise ValueError(f"empty grid: stop {stop} < start {start}")
    count = int(math.floor((stop - start) / step + 1e-9)) + 1
    return tuple(start + i * step for i in range(count))
