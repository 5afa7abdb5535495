"""Spatial layouts and the pathloss power model.

Base stations are laid out either as a homogeneous Poisson point process on
a disc (for the SINR distribution) or as a fixed 19-site hexagonal grid,
one center plus two rings (for the interference-sample scenarios).  The hex
grid is generated from lattice vectors a1 = ISD*(1, 0) and
a2 = ISD*(1/2, sqrt(3)/2): ring one holds 6 sites at distance ISD, ring two
6 sites at sqrt(3)*ISD and 6 at 2*ISD.  The user terminal sits at
(serving_distance, 0) and the serving site at the origin is never an
interferer.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np


@dataclass(frozen=True)
class PppConfig:
    """Density (points per m^2) and simulation disc radius (m)."""

    density: float
    window_radius: float

    def __post_init__(self):
        if not (self.density > 0 and math.isfinite(self.density)):
            raise ValueError(f"density must be > 0, got {self.density}")
        if not (self.window_radius > 0 and math.isfinite(self.window_radius)):
            raise ValueError(
                f"window_radius must be > 0, got {self.window_radius}")


@dataclass(frozen=True)
class HexScenario:
    """Two-ring hexagonal layout: site count, inter-site distance, UE offset."""

    n_b: int = 19
    isd: float = 100.0
    serving_distance: float = 50.0

    def __post_init__(self):
        if self.n_b != 19:
            raise ValueError(
                f"only the 19-site two-ring layout is supported, got n_b={self.n_b}")
        if not self.isd > 0:
            raise ValueError(f"isd must be > 0, got {self.isd}")
        if not 0 < self.serving_distance < self.isd:
            raise ValueError(
                "serving_distance must lie in (0, isd), got "
                f"{self.serving_distance}")


@dataclass(frozen=True)
class PathlossModel:
    """Power-law pathloss: received power = tx_power * distance^-alpha."""

    alpha: float
    tx_power: float

    def __post_init__(self):
        # alpha = 2 makes the interference functional diverge
        if not self.alpha > 2:
            raise ValueError(f"alpha must be > 2, got {self.alpha}")
        if not self.tx_power > 0:
            raise ValueError(f"tx_power must be > 0, got {self.tx_power}")


def default_window_radius(density: float) -> float:
    """Disc radius making truncated far-field interference negligible.

    40/sqrt(pi*density) puts the expected number of points at 1600, far
    enough that the tail beyond the window carries well under 0.1% of the
    expected interference at alpha = 3.
    """
    if not density > 0:
        raise ValueError(f"density must be > 0, got {density}")
    return 40.0 / math.sqrt(math.pi * density)


def sample_ppp(cfg: PppConfig, rng: np.random.Generator) -> np.ndarray:
    """One Poisson point process draw on the disc; (count, 2) array.

    Count ~ Poisson(density*pi*R^2); points uniform on the disc via the
    sqrt-radius transform.
    """
    mean_count = cfg.density * math.pi * cfg.window_radius ** 2
    count = int(rng.poisson(mean_count))
    radii = cfg.window_radius * np.sqrt(rng.random(count))
    angles = 2.0 * math.pi * rng.random(count)
    return np.column_stack((radii * np.cos(angles), radii * np.sin(angles)))


def thin_points(points: np.ndarray, keep_prob: float,
                rng: np.random.Generator) -> np.ndarray:
    """Keep each point independently with probability keep_prob."""
    if not 0.0 <= keep_prob <= 1.0:
        raise ValueError(f"keep_prob must be in [0, 1], got {keep_prob}")
    keep = rng.random(len(points)) < keep_prob
    return points[keep]


def hex_grid(scenario: HexScenario) -> np.ndarray:
    """Site positions, (19, 2): center first, then ring one, then ring two."""
    isd = scenario.isd
    a1 = np.array([isd, 0.0])
    a2 = np.array([isd * 0.5, isd * math.sqrt(3.0) / 2.0])
    ring1 = [a1, a2, a2 - a1, -a1, -a2, a1 - a2]
    ring2_mid = [a1 + a2, 2 * a2 - a1, a2 - 2 * a1,
                 -a1 - a2, a1 - 2 * a2, 2 * a1 - a2]
    ring2_far = [2 * a1, 2 * a2, 2 * (a2 - a1),
                 -2 * a1, -2 * a2, 2 * (a1 - a2)]
    return np.vstack([np.zeros((1, 2))] + ring1 + ring2_mid + ring2_far)


def ue_position(scenario: HexScenario) -> np.ndarray:
    return np.array([scenario.serving_distance, 0.0])


def interferer_distances(scenario: HexScenario) -> np.ndarray:
    """Distances (m) from the UE to each non-serving site, layout order."""
    sites = hex_grid(scenario)[1:]
    return np.hypot(sites[:, 0] - scenario.serving_distance, sites[:, 1])


def received_power(model: PathlossModel, distance: float) -> float:
    """Average received power (W) at the given distance (m)."""
    if not distance > 0:
        raise ValueError(f"distance must be > 0, got {distance}")
    return model.tx_power * distance ** (-model.alpha)
