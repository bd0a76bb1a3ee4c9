"""Random-waypoint user motion.

Each user moves in a straight line toward its current waypoint at constant
speed.  On arrival the residual step distance is discarded and a fresh
waypoint is sampled.  The ``full`` variant draws waypoints uniformly over
the whole map; the ``limited`` variant confines each user to a disc around
a per-user anchor, which yields the low-mobility regime.

Every user owns its own RNG stream, so users can be stepped in any order
(or concurrently) without changing the draws any one of them sees.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .config import MobilityConfig

__all__ = ["UeMotionState", "init_positions", "sample_waypoint", "step_motion"]


@dataclass
class UeMotionState:
    """Motion bookkeeping for one user."""

    position: np.ndarray
    waypoint: np.ndarray
    anchor: np.ndarray | None
    ue_index: int


def _uniform_in_map(cfg: MobilityConfig, rng) -> np.ndarray:
    return np.array([rng.random() * cfg.map_width, rng.random() * cfg.map_height])


def _uniform_in_disc(center, radius, cfg: MobilityConfig, rng) -> np.ndarray:
    """Uniform draw from disc(center, radius) intersected with the map.

    Rejection against the map boundary; the center itself lies in the map,
    so the acceptance region is never empty.
    """
    cx, cy = float(center[0]), float(center[1])
    while True:
        r = radius * math.sqrt(rng.random())
        theta = 2.0 * math.pi * rng.random()
        x, y = cx + r * math.cos(theta), cy + r * math.sin(theta)
        if 0.0 <= x <= cfg.map_width and 0.0 <= y <= cfg.map_height:
            return np.array([x, y])


def sample_waypoint(cfg: MobilityConfig, state: UeMotionState, rng) -> np.ndarray:
    """Next waypoint for a user: map-wide, or near the anchor when limited."""
    if cfg.variant == "limited":
        return _uniform_in_disc(state.anchor, cfg.waypoint_radius, cfg, rng)
    return _uniform_in_map(cfg, rng)


def init_positions(cfg: MobilityConfig, n_ues: int, rngs) -> list[UeMotionState]:
    """Draw initial motion state for every user, one RNG stream each."""
    if len(rngs) != n_ues:
        raise ValueError(f"expected {n_ues} rng streams, got {len(rngs)}")
    states = []
    for idx in range(n_ues):
        rng = rngs[idx]
        if cfg.variant == "limited":
            if cfg.anchors is not None:
                anchor = np.array(cfg.anchors[idx], dtype=float)
            else:
                anchor = _uniform_in_map(cfg, rng)
            position = _uniform_in_disc(anchor, cfg.init_radius, cfg, rng)
        else:
            anchor = None
            position = _uniform_in_map(cfg, rng)
        state = UeMotionState(position=position, waypoint=position, anchor=anchor,
                              ue_index=idx)
        state.waypoint = sample_waypoint(cfg, state, rng)
        states.append(state)
    return states


def step_motion(state: UeMotionState, cfg: MobilityConfig, rng) -> UeMotionState:
    """Advance one user by one step; returns a new state.

    Zero speed freezes the user entirely (waypoint included).  When the
    waypoint is closer than one step, the user lands on it exactly and the
    leftover distance is discarded.
    """
    if cfg.speed <= 0.0:
        return UeMotionState(position=state.position.copy(),
                             waypoint=state.waypoint.copy(),
                             anchor=state.anchor, ue_index=state.ue_index)
    delta = state.waypoint - state.position
    dist = float(np.hypot(delta[0], delta[1]))
    if dist <= cfg.speed:
        new = UeMotionState(position=state.waypoint.copy(),
                            waypoint=state.waypoint.copy(),
                            anchor=state.anchor, ue_index=state.ue_index)
        new.waypoint = sample_waypoint(cfg, new, rng)
        return new
    return UeMotionState(position=state.position + delta * (cfg.speed / dist),
                         waypoint=state.waypoint.copy(),
                         anchor=state.anchor, ue_index=state.ue_index)
