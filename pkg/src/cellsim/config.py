"""Scenario configuration for the multi-cell association simulator.

Every tunable lives here: map geometry, radio constants, the rate-to-utility
mapping, user mobility, channel fading, and episode settings.  Configs
serialize to a sectioned JSON document whose canonical SHA-256 hash stamps
every dataset built from them, so a trajectory file can always be traced
back to the exact scenario that produced it.
"""

from __future__ import annotations

import hashlib
import json
import math
from dataclasses import dataclass, field

import numpy as np

__all__ = [
    "RadioParams",
    "UtilityParams",
    "MobilityConfig",
    "FadingModel",
    "NetworkConfig",
    "default_config",
    "parse_fading",
    "load_config",
    "save_config",
    "DEFAULT_MEDIUM_EPSILON",
]

# Log-distance path loss defaults (dB domain).
_TX_POWER_DBM = 30.0
_NOISE_DBM = -90.0
_PATHLOSS_EXPONENT = 3.0
_REFERENCE_DISTANCE = 1.0
_REFERENCE_PATHLOSS_DB = 40.0

DEFAULT_MAP_SIZE = 200.0

# Distance at which the normalized SNR saturates to 1.  Chosen so that the
# 0.1-grid of association thresholds discriminates users over the distances
# that actually occur on the default map; anchoring the upper reference at
# the path-loss reference distance instead would squash almost every
# normalized SNR to ~0 and make thresholding degenerate.
DEFAULT_UPPER_REF_DISTANCE = 20.0

DEFAULT_SPEED = 2.5
# Rate scale of log2(1 + snr).  Calibrated together with the upper SNR
# reference so a tracking policy beats a threshold-agnostic one by a wide
# margin while the reward still peaks at an interior threshold.
DEFAULT_BANDWIDTH = 600.0
DEFAULT_HORIZON = 100
DEFAULT_THRESHOLD_STEP = 0.1

# Exploration rate of the medium-tier behavioral policy.
DEFAULT_MEDIUM_EPSILON = 0.3


def _snr_from_distance(distance, tx_power_dbm, noise_dbm, reference_pathloss_db,
                       pathloss_exponent, reference_distance):
    """Linear SNR of the log-distance law; accepts scalars or arrays."""
    d = np.maximum(distance, reference_distance)
    snr_db = (tx_power_dbm - noise_dbm - reference_pathloss_db
              - 10.0 * pathloss_exponent * np.log10(d / reference_distance))
    return 10.0 ** (snr_db / 10.0)


def _default_ref(distance):
    return float(_snr_from_distance(distance, _TX_POWER_DBM, _NOISE_DBM,
                                    _REFERENCE_PATHLOSS_DB, _PATHLOSS_EXPONENT,
                                    _REFERENCE_DISTANCE))


_DEFAULT_UPPER_REF = _default_ref(DEFAULT_UPPER_REF_DISTANCE)
_DEFAULT_LOWER_REF = _default_ref(math.hypot(DEFAULT_MAP_SIZE, DEFAULT_MAP_SIZE) / 2.0)


@dataclass(frozen=True)
class RadioParams:
    """Log-distance path loss constants plus the SNR normalization window.

    ``snr_upper_ref`` and ``snr_lower_ref`` are linear SNR ratios: raw SNR at
    or above the upper reference normalizes to 1, at or below the lower
    reference to 0.  The lower reference doubles as the disconnection
    frontier of the scenario.
    """

    tx_power_dbm: float = _TX_POWER_DBM
    noise_dbm: float = _NOISE_DBM
    pathloss_exponent: float = _PATHLOSS_EXPONENT
    reference_distance: float = _REFERENCE_DISTANCE
    reference_pathloss_db: float = _REFERENCE_PATHLOSS_DB
    snr_upper_ref: float = _DEFAULT_UPPER_REF
    snr_lower_ref: float = _DEFAULT_LOWER_REF

    def __post_init__(self):
        if self.reference_distance <= 0:
            raise ValueError("reference_distance must be positive")
        if self.pathloss_exponent <= 0:
            raise ValueError("pathloss_exponent must be positive")
        if not (self.snr_upper_ref > self.snr_lower_ref > 0):
            raise ValueError("need snr_upper_ref > snr_lower_ref > 0")

    def raw_snr_at_distance(self, distance):
        """Linear SNR at a given link distance (scalar or array)."""
        return _snr_from_distance(distance, self.tx_power_dbm, self.noise_dbm,
                                  self.reference_pathloss_db, self.pathloss_exponent,
                                  self.reference_distance)

    @classmethod
    def for_map(cls, map_width, map_height,
                upper_ref_distance=DEFAULT_UPPER_REF_DISTANCE,
                lower_ref_distance=None,
                tx_power_dbm=_TX_POWER_DBM, noise_dbm=_NOISE_DBM,
                pathloss_exponent=_PATHLOSS_EXPONENT,
                reference_distance=_REFERENCE_DISTANCE,
                reference_pathloss_db=_REFERENCE_PATHLOSS_DB) -> "RadioParams":
        """Build params with references derived from the map geometry.

        The upper reference is the raw SNR at ``upper_ref_distance``; the
        lower reference defaults to the raw SNR at half the map diagonal.
        """
        if lower_ref_distance is None:
            lower_ref_distance = math.hypot(map_width, map_height) / 2.0
        args = (tx_power_dbm, noise_dbm, reference_pathloss_db,
                pathloss_exponent, reference_distance)
        return cls(tx_power_dbm=tx_power_dbm, noise_dbm=noise_dbm,
                   pathloss_exponent=pathloss_exponent,
                   reference_distance=reference_distance,
                   reference_pathloss_db=reference_pathloss_db,
                   snr_upper_ref=float(_snr_from_distance(upper_ref_distance, *args)),
                   snr_lower_ref=float(_snr_from_distance(lower_ref_distance, *args)))


@dataclass(frozen=True)
class UtilityParams:
    """Shape of the per-user rate-to-utility mapping.

    A delivered rate ``d`` maps to ``g(d) = clip(w1 * log(w2 + d) / log(w3),
    clip_low, clip_high)`` and then rescales linearly onto [0, 1].
    ``aggregate`` selects whether a user's rate across its connected stations
    is averaged or summed before the mapping.
    """

    bandwidth: float = DEFAULT_BANDWIDTH
    w1: float = 10.0
    w2: float = 1.0
    w3: float = 10.0
    clip_low: float = -20.0
    clip_high: float = 20.0
    aggregate: str = "mean"

    def __post_init__(self):
        if self.bandwidth <= 0:
            raise ValueError("bandwidth must be positive")
        if self.w2 <= 0:
            raise ValueError("w2 must be positive to keep log(w2 + d) finite at d = 0")
        if self.w3 <= 1:
            raise ValueError("w3 must exceed 1")
        if not self.clip_high > self.clip_low:
            raise ValueError("need clip_high > clip_low")
        if self.aggregate not in ("mean", "sum"):
            raise ValueError(f"unknown aggregate {self.aggregate!r}")


@dataclass(frozen=True)
class MobilityConfig:
    """Random-waypoint motion settings.

    ``full`` roams the whole map.  ``limited`` confines each user to a disc
    around a per-user anchor: initial positions within ``init_radius``,
    waypoints within ``waypoint_radius``.  Anchors are resampled per episode
    unless pinned explicitly via ``anchors``.
    """

    variant: str = "full"
    speed: float = DEFAULT_SPEED
    map_width: float = DEFAULT_MAP_SIZE
    map_height: float = DEFAULT_MAP_SIZE
    init_radius: float = 20.0
    waypoint_radius: float = 10.0
    anchors: tuple | None = None

    def __post_init__(self):
        if self.variant not in ("full", "limited"):
            raise ValueError(f"unknown mobility variant {self.variant!r}")
        if self.speed < 0:
            raise ValueError("speed must be non-negative")
        if self.map_width <= 0 or self.map_height <= 0:
            raise ValueError("map dimensions must be positive")
        if self.init_radius < 0 or self.waypoint_radius < 0:
            raise ValueError("radii must be non-negative")
        if self.anchors is not None:
            anchors = tuple((float(x), float(y)) for x, y in self.anchors)
            object.__setattr__(self, "anchors", anchors)
            for x, y in anchors:
                if not (0 <= x <= self.map_width and 0 <= y <= self.map_height):
                    raise ValueError(f"anchor ({x}, {y}) outside map")


@dataclass(frozen=True)
class FadingModel:
    """Small-scale fading of the channel amplitude H with E[H^2] = omega.

    ``none`` fixes H = 1, ``rayleigh`` draws from the Rayleigh law, and
    ``rician`` adds a line-of-sight component of strength ``k_factor``
    (k_factor = 0 reduces to Rayleigh).
    """

    kind: str = "none"
    omega: float = 1.0
    k_factor: float = 0.0

    def __post_init__(self):
        if self.kind not in ("none", "rayleigh", "rician"):
            raise ValueError(f"unknown fading kind {self.kind!r}")
        if self.omega <= 0:
            raise ValueError("omega must be positive")
        if self.k_factor < 0:
            raise ValueError("k_factor must be non-negative")

    def label(self) -> str:
        if self.kind == "rician":
            return f"rician:{self.k_factor:g}"
        return self.kind


def parse_fading(spec: str) -> FadingModel:
    """Parse a fading spec string: ``none``, ``rayleigh``, or ``rician:K``."""
    spec = spec.strip().lower()
    if spec in ("none", "rayleigh"):
        return FadingModel(kind=spec)
    if spec.startswith("rician"):
        _, _, k = spec.partition(":")
        if not k:
            raise ValueError("rician fading needs a K factor, e.g. rician:3")
        return FadingModel(kind="rician", k_factor=float(k))
    raise ValueError(f"unknown fading spec {spec!r}")


def _default_bs_positions():
    # Three stations evenly spaced on the horizontal midline of the map.
    w, h = DEFAULT_MAP_SIZE, DEFAULT_MAP_SIZE
    return ((w / 4.0, h / 2.0), (w / 2.0, h / 2.0), (3.0 * w / 4.0, h / 2.0))


@dataclass(frozen=True)
class NetworkConfig:
    """Immutable description of one simulation scenario."""

    n_bs: int = 3
    n_ues: int = 5
    bs_positions: tuple = field(default_factory=_default_bs_positions)
    radio: RadioParams = field(default_factory=RadioParams)
    utility: UtilityParams = field(default_factory=UtilityParams)
    mobility: MobilityConfig = field(default_factory=MobilityConfig)
    fading: FadingModel = field(default_factory=FadingModel)
    horizon: int = DEFAULT_HORIZON
    threshold_step: float = DEFAULT_THRESHOLD_STEP

    def __post_init__(self):
        positions = tuple((float(x), float(y)) for x, y in self.bs_positions)
        object.__setattr__(self, "bs_positions", positions)
        if self.n_bs < 1 or self.n_ues < 1:
            raise ValueError("need at least one station and one user")
        if len(positions) != self.n_bs:
            raise ValueError(f"expected {self.n_bs} station positions, got {len(positions)}")
        m = self.mobility
        for x, y in positions:
            if not (0 <= x <= m.map_width and 0 <= y <= m.map_height):
                raise ValueError(f"station at ({x}, {y}) outside map")
        if m.anchors is not None and len(m.anchors) != self.n_ues:
            raise ValueError(f"expected {self.n_ues} anchors, got {len(m.anchors)}")
        if self.horizon < 1:
            raise ValueError("horizon must be at least 1")
        if not (0 < self.threshold_step <= 1):
            raise ValueError("threshold_step must lie in (0, 1]")

    @property
    def n_actions(self) -> int:
        return 3 ** self.n_bs

    @property
    def obs_dim(self) -> int:
        return self.n_bs + self.n_bs * self.n_ues + self.n_ues

    def to_dict(self) -> dict:
        m, r, u, f = self.mobility, self.radio, self.utility, self.fading
        return {
            "network": {
                "n_bs": self.n_bs,
                "n_ues": self.n_ues,
                "bs_positions": [list(p) for p in self.bs_positions],
            },
            "radio": {
                "tx_power_dbm": r.tx_power_dbm,
                "noise_dbm": r.noise_dbm,
                "pathloss_exponent": r.pathloss_exponent,
                "reference_distance": r.reference_distance,
                "reference_pathloss_db": r.reference_pathloss_db,
                "snr_upper_ref": r.snr_upper_ref,
                "snr_lower_ref": r.snr_lower_ref,
            },
            "utility": {
                "bandwidth": u.bandwidth,
                "w1": u.w1,
                "w2": u.w2,
                "w3": u.w3,
                "clip_low": u.clip_low,
                "clip_high": u.clip_high,
                "aggregate": u.aggregate,
            },
            "mobility": {
                "variant": m.variant,
                "speed": m.speed,
                "map_width": m.map_width,
                "map_height": m.map_height,
                "init_radius": m.init_radius,
                "waypoint_radius": m.waypoint_radius,
                "anchors": None if m.anchors is None else [list(a) for a in m.anchors],
            },
            "fading": {
                "kind": f.kind,
                "omega": f.omega,
                "k_factor": f.k_factor,
            },
            "episode": {
                "horizon": self.horizon,
                "threshold_step": self.threshold_step,
            },
        }

    @classmethod
    def from_dict(cls, doc: dict) -> "NetworkConfig":
        net = doc["network"]
        mob = dict(doc["mobility"])
        anchors = mob.get("anchors")
        if anchors is not None:
            mob["anchors"] = tuple(tuple(a) for a in anchors)
        episode = doc["episode"]
        return cls(
            n_bs=int(net["n_bs"]),
            n_ues=int(net["n_ues"]),
            bs_positions=tuple(tuple(p) for p in net["bs_positions"]),
            radio=RadioParams(**doc["radio"]),
            utility=UtilityParams(**doc["utility"]),
            mobility=MobilityConfig(**mob),
            fading=FadingModel(**doc["fading"]),
            horizon=int(episode["horizon"]),
            threshold_step=float(episode["threshold_step"]),
        )

    def canonical_json(self) -> str:
        return json.dumps(self.to_dict(), sort_keys=True, separators=(",", ":"))

    def canonical_hash(self) -> str:
        return hashlib.sha256(self.canonical_json().encode("utf-8")).hexdigest()


def default_config(mobility_variant: str = "full", fading="none",
                   horizon: int = DEFAULT_HORIZON) -> NetworkConfig:
    """The default 3-station / 5-user scenario with a chosen mobility variant.

    The limited variant pins every anchor at one shared off-row point, so
    all users live in one disc: initial positions within ``init_radius`` of
    it, waypoints within ``waypoint_radius``.  The point sits 40 map-units
    below the central station, far enough that association choices still
    matter (on the station row itself every threshold connects and the
    episode saturates).  Configs that want per-user anchor placement can
    pass explicit ``anchors`` or leave them unset to have fresh ones drawn
    each episode.
    """
    model = fading if isinstance(fading, FadingModel) else parse_fading(fading)
    cluster = (DEFAULT_MAP_SIZE / 2.0, DEFAULT_MAP_SIZE * 0.3)
    anchors = (cluster,) * 5 if mobility_variant == "limited" else None
    return NetworkConfig(mobility=MobilityConfig(variant=mobility_variant,
                                                 anchors=anchors),
                         fading=model, horizon=horizon)


def load_config(path) -> NetworkConfig:
    with open(path, "r", encoding="utf-8") as fh:
        return NetworkConfig.from_dict(json.load(fh))


def save_config(cfg: NetworkConfig, path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(cfg.to_dict(), fh, indent=2, sort_keys=True)
        fh.write("\n")
