"""Evaluation harness: policy scoring, score rescaling, and fading sweeps.

Evaluation runs a policy for a block of consecutive seeds and reports the
mean and population standard deviation of episode returns.  Fading sweeps
reuse the same seed block for every fading model (common random numbers):
mobility and policy streams are independent of the fading stream, so the
state-action sequences coincide across models and the return gaps isolate
the fading effect.
"""

from __future__ import annotations

import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, replace as dc_replace

import numpy as np

from .config import FadingModel, NetworkConfig
from .data import collect_trajectory

__all__ = ["EvalResult", "evaluate", "rescale", "SweepRow", "SweepReport", "fading_sweep"]


def _episode_return(cfg: NetworkConfig, policy, seed: int) -> float:
    return collect_trajectory(cfg, policy, seed).total_return


@dataclass(frozen=True)
class EvalResult:
    policy_id: str
    n_episodes: int
    seed_base: int
    mean: float
    std: float
    returns: tuple

    def to_text(self) -> str:
        return (f"policy={self.policy_id} episodes={self.n_episodes}"
                f" seed_base={self.seed_base}\nmean={self.mean!r}\nstd={self.std!r}")


def evaluate(cfg: NetworkConfig, policy, n_episodes: int = 30, seed_base: int = 0,
             workers: int = 1) -> EvalResult:
    """Mean and population std of returns over seeds seed_base..+n-1."""
    if n_episodes < 1:
        raise ValueError("n_episodes must be positive")
    seeds = [seed_base + k for k in range(n_episodes)]
    if workers > 1 and n_episodes > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            chunk = max(1, n_episodes // (workers * 4))
            rets = list(pool.map(_episode_return, [cfg] * n_episodes,
                                 [policy] * n_episodes, seeds, chunksize=chunk))
    else:
        rets = [_episode_return(cfg, policy, s) for s in seeds]
    arr = np.asarray(rets, dtype=float)
    return EvalResult(policy_id=policy.policy_id, n_episodes=n_episodes,
                      seed_base=seed_base, mean=float(arr.mean()),
                      std=float(arr.std()), returns=tuple(rets))


def rescale(mean: float, expert_mean: float, random_mean: float) -> float:
    """Map a raw mean return onto the 0-100 scale spanned by the random and
    expert baselines.  Unclipped, so scores may leave [0, 100]."""
    span = expert_mean - random_mean
    if span == 0:
        raise ValueError("degenerate baselines: expert and random means coincide")
    return 100.0 * (mean - random_mean) / span


def _stochasticity_rank(model: FadingModel) -> float:
    # Higher rank = closer to the deterministic channel.
    if model.kind == "none":
        return math.inf
    if model.kind == "rician":
        return model.k_factor
    return 0.0  # rayleigh


@dataclass(frozen=True)
class SweepRow:
    policy_id: str
    fading: str
    mobility_variant: str
    n_episodes: int
    mean: float
    std: float
    score: float | None


@dataclass(frozen=True)
class SweepReport:
    """Per-model evaluation rows plus adjacent-pair ordering checks.

    ``pair_checks`` holds (less_stochastic, more_stochastic, gap, gap_sem,
    ok) tuples where gap = mean(less) - mean(more) and the SEM comes from
    the per-seed paired differences.  ``ordering_ok`` is the conjunction of
    the per-pair flags at a 2-SEM tolerance.
    """

    rows: tuple
    pair_checks: tuple
    ordering_ok: bool

    def to_csv(self) -> str:
        lines = ["policy_id,fading,mobility_variant,n_episodes,mean,std,score"]
        for row in self.rows:
            score = "" if row.score is None else repr(row.score)
            lines.append(f"{row.policy_id},{row.fading},{row.mobility_variant},"
                         f"{row.n_episodes},{row.mean!r},{row.std!r},{score}")
        return "\n".join(lines)


def fading_sweep(cfg: NetworkConfig, policy, models, n_episodes: int = 100,
                 seed_base: int = 0, baselines=None, workers: int = 1) -> SweepReport:
    """Evaluate one policy under several fading models on shared seeds.

    ``baselines``, when given as (expert_mean, random_mean), adds a 0-100
    score column.  The ordering check sorts models from least to most
    stochastic (none, then descending Rician K, then Rayleigh) and flags any
    adjacent pair whose mean gap drops below -2 paired SEMs.
    """
    models = list(models)
    results = []
    for model in models:
        res = evaluate(dc_replace(cfg, fading=model), policy,
                       n_episodes=n_episodes, seed_base=seed_base, workers=workers)
        results.append(res)
    rows = []
    for model, res in zip(models, results):
        score = None
        if baselines is not None:
            score = rescale(res.mean, baselines[0], baselines[1])
        rows.append(SweepRow(policy_id=policy.policy_id, fading=model.label(),
                             mobility_variant=cfg.mobility.variant,
                             n_episodes=n_episodes, mean=res.mean, std=res.std,
                             score=score))
    order = sorted(range(len(models)),
                   key=lambda i: _stochasticity_rank(models[i]), reverse=True)
    checks = []
    ok_all = True
    for a, b in zip(order, order[1:]):
        less, more = results[a], results[b]
        diffs = np.asarray(less.returns) - np.asarray(more.returns)
        gap = float(diffs.mean())
        sem = float(diffs.std() / math.sqrt(len(diffs)))
        ok = gap >= -2.0 * sem
        ok_all = ok_all and ok
        checks.append((models[a].label(), models[b].label(), gap, sem, bool(ok)))
    return SweepReport(rows=tuple(rows), pair_checks=tuple(checks),
                       ordering_ok=bool(ok_all))
