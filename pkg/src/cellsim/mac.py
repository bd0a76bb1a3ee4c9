"""Connection logic, rate-fair sharing, per-user utility, and the step reward.

Given a normalized SNR matrix ``gamma`` (stations x users) and per-station
association thresholds ``tau``:

    d_ij = b log2(1 + gamma_ij)                      achievable rate
    c_ij = 1 iff gamma_ij >= tau_i and gamma_ij > 0  connection indicator
    a_ij = 1 / sum_k c_ik d_ij / d_ik                rate-fair time fraction

so every user connected to station i is delivered the same rate
``a_ij d_ij = 1 / sum_k c_ik / d_ik``.  A user's rate aggregates its
delivered rates over the stations serving it (mean by default), maps
through the clipped log utility ``g`` and the linear rescale ``h`` onto
[0, 1], and the step reward is the mean utility over all users.

Fading never alters connections or allocations: both are always computed
from the state SNR matrix, while the faded (unclipped) SNR enters only the
``log2(1 + .)`` rate terms.  That structure makes the no-fading reward an
upper bound on the expected faded reward, which ``verify_jensen`` checks by
Monte Carlo and ``concavity_probe`` supports by probing concavity of the
composed per-user utility.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .config import FadingModel, UtilityParams
from .radio import sample_fading

__all__ = [
    "data_rate",
    "connections",
    "ratefair_fractions",
    "user_rates",
    "user_rate",
    "utility",
    "reward_terms",
    "reward",
    "JensenReport",
    "verify_jensen",
    "ConcavityReport",
    "concavity_probe",
]


def data_rate(gamma, bandwidth: float):
    """Achievable rate b log2(1 + gamma); gamma must be non-negative."""
    g = np.asarray(gamma, dtype=float)
    if np.any(g < 0):
        raise ValueError("SNR must be non-negative")
    out = bandwidth * np.log2(1.0 + g)
    return float(out) if out.ndim == 0 else out


def connections(snr, tau) -> np.ndarray:
    """Boolean connection matrix: gamma_ij >= tau_i and gamma_ij > 0.

    ``snr`` has shape (..., n_bs, n_ues) and ``tau`` (..., n_bs); leading
    axes broadcast, so a single SNR matrix can be evaluated against a batch
    of threshold vectors at once.
    """
    snr = np.asarray(snr, dtype=float)
    tau = np.asarray(tau, dtype=float)
    return (snr >= tau[..., None]) & (snr > 0.0)


def ratefair_fractions(snr, conn, bandwidth: float) -> np.ndarray:
    """Time fraction a_ij each station grants each connected user.

    Disconnected pairs get 0.  For station i the delivered rate
    ``a_ij d_ij`` is the same for every connected user j, namely
    ``1 / sum_k c_ik / d_ik``.
    """
    rates = data_rate(snr, bandwidth)
    conn = np.asarray(conn, dtype=bool)
    safe = np.where(conn, rates, 1.0)
    load = np.where(conn, 1.0 / safe, 0.0).sum(axis=-1, keepdims=True)
    share = np.divide(1.0, load, out=np.zeros_like(load), where=load > 0)
    return np.where(conn, share / safe, 0.0)


def user_rates(conn, alloc, rates, aggregate: str = "mean") -> np.ndarray:
    """Aggregate each user's delivered rate over its serving stations.

    ``rates`` are the rates entering the reward (possibly computed from a
    faded SNR matrix); ``conn`` and ``alloc`` always come from the state.
    Users with no connection get 0.
    """
    conn = np.asarray(conn, dtype=bool)
    delivered = np.where(conn, alloc * rates, 0.0)
    total = delivered.sum(axis=-2)
    if aggregate == "sum":
        return total
    n = conn.sum(axis=-2)
    return np.divide(total, n, out=np.zeros_like(total), where=n > 0)


def user_rate(snr, conn, alloc, bandwidth: float, j: int, aggregate: str = "mean") -> float:
    """Delivered rate of a single user (see ``user_rates``)."""
    rates = data_rate(snr, bandwidth)
    return float(user_rates(conn, alloc, rates, aggregate)[..., j])


def utility(rate, params: UtilityParams):
    """Clipped log utility of a delivered rate, rescaled onto [0, 1]."""
    r = np.asarray(rate, dtype=float)
    g = np.clip(params.w1 * np.log(params.w2 + r) / np.log(params.w3),
                params.clip_low, params.clip_high)
    out = (g - params.clip_low) / (params.clip_high - params.clip_low)
    return float(out) if out.ndim == 0 else out


def reward_terms(snr_state, tau, params: UtilityParams, reward_snr=None):
    """Deterministic reward core: (mean utility, per-user utilities).

    Connections and allocations are derived from ``snr_state``; the rate
    terms use ``reward_snr`` when given (e.g. a faded matrix).  Leading batch
    axes broadcast through, so ``tau`` may be a batch of threshold vectors
    or ``reward_snr`` a batch of faded matrices.
    """
    snr_state = np.asarray(snr_state, dtype=float)
    conn = connections(snr_state, tau)
    alloc = ratefair_fractions(snr_state, conn, params.bandwidth)
    rates = data_rate(snr_state if reward_snr is None else reward_snr, params.bandwidth)
    utils = utility(user_rates(conn, alloc, rates, params.aggregate), params)
    return utils.mean(axis=-1), utils


def reward(snr_state, tau, fading: FadingModel | None, params: UtilityParams, rng=None):
    """One step reward: (reward in [0, 1], per-user utilities).

    Deterministic whenever fading is off; otherwise each station-user pair
    is scaled by an independent |H|^2 draw before the rate terms.
    """
    if fading is None or fading.kind == "none":
        rew, utils = reward_terms(snr_state, tau, params)
    else:
        gains = np.asarray(sample_fading(fading, rng, size=np.shape(snr_state))) ** 2
        rew, utils = reward_terms(snr_state, tau, params,
                                  reward_snr=np.asarray(snr_state, dtype=float) * gains)
    return float(rew), utils


@dataclass(frozen=True)
class JensenReport:
    """Monte Carlo comparison of the faded reward against its no-fading bound."""

    model: str
    n_samples: int
    fixed_allocation: bool
    r: float
    mean_R: float
    std_R: float
    holds: bool

    @property
    def sem(self) -> float:
        return self.std_R / math.sqrt(self.n_samples)

    def to_text(self) -> str:
        lines = [
            f"jensen: model={self.model} fixed_allocation={self.fixed_allocation}"
            f" n_samples={self.n_samples}",
            f"r={self.r!r}",
            f"mean_R={self.mean_R!r}",
            f"std_R={self.std_R!r}",
            f"sem={self.sem!r}",
            f"holds={self.holds}",
        ]
        return "\n".join(lines)

    def to_csv(self) -> str:
        header = "model,n_samples,fixed_allocation,r,mean_R,std_R,sem,holds"
        row = (f"{self.model},{self.n_samples},{self.fixed_allocation},"
               f"{self.r!r},{self.mean_R!r},{self.std_R!r},{self.sem!r},{self.holds}")
        return header + "\n" + row


def verify_jensen(snr, tau, fading: FadingModel | None, params: UtilityParams,
                  n_samples: int = 100_000, fixed_allocation: bool = True,
                  rng=None) -> JensenReport:
    """Check E[reward under fading] <= reward without fading by Monte Carlo.

    With ``fixed_allocation`` connections and allocations stay frozen at
    their state values (the regime in which the bound is a theorem) and the
    check asserts ``mean_R <= r + 3 std_R / sqrt(n)``.  Without it the whole
    pipeline is recomputed from every faded draw and the report is
    informational only.
    """
    if n_samples < 10_000:
        raise ValueError("n_samples must be at least 10000")
    snr = np.asarray(snr, dtype=float)
    label = "none" if fading is None else fading.label()
    r, _ = reward_terms(snr, tau, params)
    r = float(r)
    if fading is None or fading.kind == "none":
        # Degenerate distribution: every sample equals r exactly.
        return JensenReport(model=label, n_samples=n_samples,
                            fixed_allocation=fixed_allocation,
                            r=r, mean_R=r, std_R=0.0, holds=True)
    rng = np.random.default_rng(rng)
    gains = sample_fading(fading, rng, size=(n_samples,) + snr.shape) ** 2
    faded = snr * gains
    if fixed_allocation:
        samples, _ = reward_terms(snr, tau, params, reward_snr=faded)
    else:
        samples, _ = reward_terms(faded, tau, params)
    mean_r = float(samples.mean())
    std_r = float(samples.std())
    holds = mean_r <= r + 3.0 * std_r / math.sqrt(n_samples)
    return JensenReport(model=label, n_samples=n_samples,
                        fixed_allocation=fixed_allocation,
                        r=r, mean_R=mean_r, std_R=std_r, holds=bool(holds))


@dataclass(frozen=True)
class ConcavityReport:
    """Result of random midpoint probes of the composed per-user utility."""

    n_trials: int
    n_checks: int
    violations: int
    max_violation: float
    passed: bool

    def to_text(self) -> str:
        return (f"concavity: trials={self.n_trials} checks={self.n_checks}"
                f" violations={self.violations}"
                f" max_violation={self.max_violation!r} passed={self.passed}")


def concavity_probe(params: UtilityParams, tau, conn=None, n_trials: int = 10_000,
                    rng=None, n_ues: int = 5, gamma_high: float = 3.0,
                    tol: float = 1e-9) -> ConcavityReport:
    """Probe concavity of gamma -> utility(user rate) at frozen allocations.

    For each trial a base SNR matrix fixes the connection matrix (unless
    ``conn`` is supplied) and the allocation fractions; two random matrices
    x, y >= 0 and a random lambda then must satisfy

        G(lambda x + (1 - lambda) y) >= lambda G(x) + (1 - lambda) G(y) - tol

    for every user, where G composes the frozen-allocation rate with the
    clipped log utility.
    """
    rng = np.random.default_rng(rng)
    tau = np.asarray(tau, dtype=float)
    shape = (n_trials, tau.shape[-1], n_ues)
    base = 1.0 - rng.random(shape)  # entries in (0, 1], so rates stay positive
    if conn is None:
        c = connections(base, tau)
    else:
        c = np.broadcast_to(np.asarray(conn, dtype=bool), shape)
    alloc = ratefair_fractions(base, c, params.bandwidth)

    def composed(g):
        rates = data_rate(g, params.bandwidth)
        return utility(user_rates(c, alloc, rates, params.aggregate), params)

    x = rng.random(shape) * gamma_high
    y = rng.random(shape) * gamma_high
    lam = rng.random((n_trials, 1))
    mid = composed(lam[..., None] * x + (1.0 - lam[..., None]) * y)
    chord = lam * composed(x) + (1.0 - lam) * composed(y)
    gap = chord - mid  # positive gap above tol is a violation
    violations = int((gap > tol).sum())
    return ConcavityReport(n_trials=n_trials, n_checks=int(gap.size),
                           violations=violations,
                           max_violation=float(gap.max()) if gap.size else 0.0,
                           passed=violations == 0)
