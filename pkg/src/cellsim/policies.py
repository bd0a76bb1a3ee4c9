"""Behavioral policies used to generate and evaluate trajectories.

Three tiers: a greedy one-step-lookahead expert, an epsilon-noisy medium
policy built on the expert, and a uniform random baseline.  Policies are
callables taking the live environment and returning an action code; the
stochastic ones draw from the environment's policy-noise stream so that a
trajectory stays a pure function of (config, seed).
"""

from __future__ import annotations

import numpy as np

from .config import DEFAULT_MEDIUM_EPSILON

__all__ = ["RandomPolicy", "GreedyExpertPolicy", "MediumPolicy", "make_policy"]


class RandomPolicy:
    """Uniform over all action codes."""

    policy_id = "random"

    def __call__(self, env) -> int:
        return int(env.policy_rng.integers(env.n_actions))


class GreedyExpertPolicy:
    """Argmax of the fading-free one-step reward; ties go to the lowest code."""

    policy_id = "expert"

    def __call__(self, env) -> int:
        return int(np.argmax(env.preview_step_rewards()))


class MediumPolicy:
    """Expert with probability 1 - epsilon, uniform random otherwise."""

    policy_id = "medium"

    def __init__(self, epsilon: float = DEFAULT_MEDIUM_EPSILON):
        if not 0.0 <= epsilon <= 1.0:
            raise ValueError("epsilon must lie in [0, 1]")
        self.epsilon = epsilon
        self._expert = GreedyExpertPolicy()

    def __call__(self, env) -> int:
        if env.policy_rng.random() < self.epsilon:
            return int(env.policy_rng.integers(env.n_actions))
        return self._expert(env)


def make_policy(name: str, epsilon: float = DEFAULT_MEDIUM_EPSILON):
    """Build a policy from its tier name."""
    if name == "expert":
        return GreedyExpertPolicy()
    if name == "medium":
        return MediumPolicy(epsilon=epsilon)
    if name == "random":
        return RandomPolicy()
    raise ValueError(f"unknown policy {name!r}")
