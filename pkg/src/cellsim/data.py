"""Trajectory collection, dataset files, ablation slicing, and statistics.

A dataset is a JSON Lines file, one trajectory per line:

    {"seed": ..., "policy_id": ..., "config_hash": ..., "total_return": ...,
     "steps": [{"t": ..., "obs": [...], "action": ..., "reward": ..., "rtg": ...}, ...]}

Numbers serialize as the shortest decimal that round-trips a 64-bit float,
so parse-then-serialize reproduces the file byte for byte.  A manifest
sidecar (``<file>.manifest.json``) records tier counts, return statistics,
and the SHA-256 of the data file.  Collection is deterministic: trajectory
k of a tier uses seed ``seed_base + k``, and worker-parallel collection
assembles results in seed order so the output is independent of the worker
count.
"""

from __future__ import annotations

import copy
import hashlib
import json
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from .config import DEFAULT_MEDIUM_EPSILON, NetworkConfig
from .env import CellularNetworkEnv
from .policies import make_policy

__all__ = [
    "Trajectory",
    "DatasetManifest",
    "collect_trajectory",
    "collect",
    "collect_medium_expert",
    "ablate",
    "return_stats",
    "histogram_overlap",
    "write_dataset",
    "load_dataset",
]

_TIER_ORDER = ("expert", "medium", "random")


@dataclass
class Trajectory:
    """One complete episode: observations, actions, rewards, returns-to-go."""

    seed: int
    policy_id: str
    config_hash: str
    observations: np.ndarray  # (T, obs_dim)
    actions: np.ndarray       # (T,)
    rewards: np.ndarray       # (T,)
    returns_to_go: np.ndarray  # (T,)

    @property
    def total_return(self) -> float:
        return float(self.returns_to_go[0])

    def __len__(self) -> int:
        return len(self.actions)

    def to_record(self) -> dict:
        steps = []
        for t in range(len(self)):
            steps.append({
                "t": t,
                "obs": [float(x) for x in self.observations[t]],
                "action": int(self.actions[t]),
                "reward": float(self.rewards[t]),
                "rtg": float(self.returns_to_go[t]),
            })
        return {
            "seed": int(self.seed),
            "policy_id": self.policy_id,
            "config_hash": self.config_hash,
            "total_return": self.total_return,
            "steps": steps,
        }

    @classmethod
    def from_record(cls, rec: dict) -> "Trajectory":
        steps = rec["steps"]
        traj = cls(
            seed=int(rec["seed"]),
            policy_id=rec["policy_id"],
            config_hash=rec["config_hash"],
            observations=np.array([s["obs"] for s in steps], dtype=float),
            actions=np.array([s["action"] for s in steps], dtype=np.int64),
            rewards=np.array([s["reward"] for s in steps], dtype=float),
            returns_to_go=np.array([s["rtg"] for s in steps], dtype=float),
        )
        if float(rec["total_return"]) != traj.total_return:
            raise ValueError(f"trajectory seed={traj.seed}: total_return does not "
                             "match its first return-to-go")
        return traj


def collect_trajectory(cfg: NetworkConfig, policy, seed: int) -> Trajectory:
    """Run one full episode and package it with exact returns-to-go."""
    env = CellularNetworkEnv(cfg)
    obs = env.reset(seed)
    observations, actions, rewards = [], [], []
    done = False
    while not done:
        action = policy(env)
        next_obs, rew, done, _ = env.step(action)
        observations.append(obs)
        actions.append(action)
        rewards.append(rew)
        obs = next_obs
    rewards_arr = np.asarray(rewards, dtype=float)
    rtg = np.empty_like(rewards_arr)
    acc = 0.0
    for t in range(len(rewards_arr) - 1, -1, -1):  # exact backward recurrence
        acc = rewards_arr[t] + acc
        rtg[t] = acc
    return Trajectory(seed=seed, policy_id=policy.policy_id,
                      config_hash=cfg.canonical_hash(),
                      observations=np.asarray(observations, dtype=float),
                      actions=np.asarray(actions, dtype=np.int64),
                      rewards=rewards_arr, returns_to_go=rtg)


@dataclass
class DatasetManifest:
    """Trajectories grouped by tier plus provenance metadata."""

    tiers: dict
    config_hash: str
    meta: dict = field(default_factory=dict)
    warnings: list = field(default_factory=list)

    def counts(self) -> dict:
        return {tier: len(trajs) for tier, trajs in self.tiers.items()}

    def total_steps(self) -> int:
        return sum(len(t) for trajs in self.tiers.values() for t in trajs)

    def tier_returns(self, tier: str) -> np.ndarray:
        return np.array([t.total_return for t in self.tiers.get(tier, ())])

    def all_trajectories(self) -> list:
        ordered = sorted(self.tiers, key=_tier_sort_key)
        return [t for tier in ordered for t in self.tiers[tier]]

    def summary_stats(self) -> dict:
        stats = {}
        for tier in sorted(self.tiers, key=_tier_sort_key):
            rets = self.tier_returns(tier)
            if len(rets) == 0:
                continue
            stats[tier] = {
                "n": int(len(rets)),
                "mean_return": float(rets.mean()),
                "std_return": float(rets.std()),
                "min_return": float(rets.min()),
                "max_return": float(rets.max()),
            }
        return stats

    def merge(self, other: "DatasetManifest") -> "DatasetManifest":
        if other.config_hash != self.config_hash:
            raise ValueError("cannot merge datasets with different config hashes")
        tiers = {tier: list(trajs) for tier, trajs in self.tiers.items()}
        for tier, trajs in other.tiers.items():
            tiers.setdefault(tier, []).extend(trajs)
        return DatasetManifest(tiers=tiers, config_hash=self.config_hash,
                               meta={**self.meta, **other.meta},
                               warnings=self.warnings + other.warnings)


def _tier_sort_key(tier: str):
    try:
        return (0, _TIER_ORDER.index(tier))
    except ValueError:
        return (1, tier)


def collect(cfg: NetworkConfig, policy, n_traj: int, seed_base: int = 0,
            workers: int = 1) -> DatasetManifest:
    """Collect ``n_traj`` episodes of one policy; seeds are seed_base + k."""
    if n_traj < 0:
        raise ValueError("n_traj must be non-negative")
    seeds = [seed_base + k for k in range(n_traj)]
    if workers > 1 and n_traj > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            chunk = max(1, n_traj // (workers * 4))
            trajs = list(pool.map(collect_trajectory, [cfg] * n_traj,
                                  [policy] * n_traj, seeds, chunksize=chunk))
    else:
        trajs = [collect_trajectory(cfg, policy, s) for s in seeds]
    meta = {"seed_ranges": {policy.policy_id: [seed_base, seed_base + n_traj]}}
    eps = getattr(policy, "epsilon", None)
    if eps is not None:
        meta["epsilon"] = eps
    return DatasetManifest(tiers={policy.policy_id: trajs},
                           config_hash=cfg.canonical_hash(), meta=meta)


def collect_medium_expert(cfg: NetworkConfig, n_per_tier: int, seed_base: int = 0,
                          epsilon: float = DEFAULT_MEDIUM_EPSILON,
                          workers: int = 1) -> DatasetManifest:
    """The default two-tier dataset: n expert episodes on seeds
    [seed_base, seed_base + n) and n medium episodes on the next n seeds."""
    expert = collect(cfg, make_policy("expert"), n_per_tier, seed_base, workers)
    medium = collect(cfg, make_policy("medium", epsilon=epsilon), n_per_tier,
                     seed_base + n_per_tier, workers)
    merged = expert.merge(medium)
    merged.meta["seed_ranges"] = {
        "expert": [seed_base, seed_base + n_per_tier],
        "medium": [seed_base + n_per_tier, seed_base + 2 * n_per_tier],
    }
    return merged


def ablate(manifest: DatasetManifest, drop_expert: float = 0.0,
           drop_medium: float = 0.0, seed: int = 0) -> DatasetManifest:
    """Drop a seeded uniform sample of trajectories from the named tiers.

    The surviving count per tier is round((1 - frac) * n) and survivors keep
    their original order.  Dropping from a tier that is absent or empty is a
    no-op recorded in the manifest warnings; dropping nothing at all returns
    an identical manifest.
    """
    fracs = {"expert": float(drop_expert), "medium": float(drop_medium)}
    for tier, frac in fracs.items():
        if not 0.0 <= frac <= 1.0:
            raise ValueError(f"drop fraction for {tier} must lie in [0, 1]")
    if all(f == 0.0 for f in fracs.values()):
        return DatasetManifest(tiers={t: list(v) for t, v in manifest.tiers.items()},
                               config_hash=manifest.config_hash,
                               meta=copy.deepcopy(manifest.meta),
                               warnings=list(manifest.warnings))
    rng = np.random.default_rng(seed)
    tiers = {t: list(v) for t, v in manifest.tiers.items()}
    warnings = list(manifest.warnings)
    for tier in ("expert", "medium"):  # fixed order keeps the draws stable
        frac = fracs[tier]
        if frac == 0.0:
            continue
        trajs = tiers.get(tier)
        if not trajs:
            warnings.append(f"ablation requested on empty tier {tier!r}; no-op")
            continue
        n = len(trajs)
        n_keep = round((1.0 - frac) * n)
        drop_idx = set(rng.choice(n, size=n - n_keep, replace=False).tolist())
        tiers[tier] = [t for i, t in enumerate(trajs) if i not in drop_idx]
    meta = copy.deepcopy(manifest.meta)
    meta["ablation"] = {"drop_expert": fracs["expert"], "drop_medium": fracs["medium"],
                        "seed": int(seed), "parent_counts": manifest.counts()}
    return DatasetManifest(tiers=tiers, config_hash=manifest.config_hash,
                           meta=meta, warnings=warnings)


def return_stats(manifest: DatasetManifest, bins: int = 30) -> dict:
    """Per-tier return statistics with histograms over the pooled range."""
    if bins < 1:
        raise ValueError("bins must be positive")
    pooled = np.concatenate([manifest.tier_returns(t) for t in manifest.tiers
                             if len(manifest.tiers[t])] or [np.array([])])
    if pooled.size == 0:
        return {"bin_edges": [], "tiers": {}}
    edges = np.histogram_bin_edges(pooled, bins=bins)
    out = {"bin_edges": edges.tolist(), "tiers": {}}
    for tier in sorted(manifest.tiers, key=_tier_sort_key):
        rets = manifest.tier_returns(tier)
        if len(rets) == 0:
            continue
        hist, _ = np.histogram(rets, bins=edges)
        out["tiers"][tier] = {
            "n": int(len(rets)),
            "mean": float(rets.mean()),
            "std": float(rets.std()),
            "min": float(rets.min()),
            "max": float(rets.max()),
            "histogram": hist.tolist(),
        }
    return out


def histogram_overlap(stats: dict, tier_a: str, tier_b: str) -> float:
    """Shared probability mass of two tiers' return histograms in [0, 1]."""
    tiers = stats["tiers"]
    ha = np.asarray(tiers[tier_a]["histogram"], dtype=float)
    hb = np.asarray(tiers[tier_b]["histogram"], dtype=float)
    return float(np.minimum(ha / ha.sum(), hb / hb.sum()).sum())


def write_dataset(manifest: DatasetManifest, path) -> str:
    """Write the JSONL data file and its manifest sidecar; returns the
    SHA-256 hex digest of the data file."""
    path = str(path)
    digest = hashlib.sha256()
    with open(path, "wb") as fh:
        for traj in manifest.all_trajectories():
            line = json.dumps(traj.to_record(), separators=(",", ":")).encode("utf-8")
            fh.write(line + b"\n")
            digest.update(line + b"\n")
    sidecar = {
        "config_hash": manifest.config_hash,
        "counts": manifest.counts(),
        "stats": manifest.summary_stats(),
        "meta": manifest.meta,
        "warnings": manifest.warnings,
        "data_sha256": digest.hexdigest(),
    }
    with open(path + ".manifest.json", "w", encoding="utf-8") as fh:
        json.dump(sidecar, fh, indent=2, sort_keys=True)
        fh.write("\n")
    return digest.hexdigest()


def load_dataset(path) -> DatasetManifest:
    """Read a JSONL dataset back into a manifest.

    Tier membership comes from each line's policy_id; all lines must carry
    the same config hash.  The sidecar, when present, restores metadata.
    """
    path = str(path)
    tiers: dict = {}
    config_hash = None
    with open(path, "r", encoding="utf-8") as fh:
        for line in fh:
            line = line.strip()
            if not line:
                continue
            traj = Trajectory.from_record(json.loads(line))
            if config_hash is None:
                config_hash = traj.config_hash
            elif traj.config_hash != config_hash:
                raise ValueError("dataset mixes trajectories from different configs")
            tiers.setdefault(traj.policy_id, []).append(traj)
    if config_hash is None:
        raise ValueError(f"dataset {path} is empty")
    meta, warnings = {}, []
    try:
        with open(path + ".manifest.json", "r", encoding="utf-8") as fh:
            sidecar = json.load(fh)
        meta = sidecar.get("meta", {})
        warnings = sidecar.get("warnings", [])
    except FileNotFoundError:
        pass
    return DatasetManifest(tiers=tiers, config_hash=config_hash,
                           meta=meta, warnings=warnings)
