"""Randomized fixture battery used by the acceptance suite and the experiment scripts."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .model import ContestSuccess, ContinuousPrior, DiscretePrior, GameConfig, ShockDistribution

BATTERY_SEED = 20261016
Q_I_GRID = (0.2, 0.5, 0.8, 1.0)
SUPPORT_MAX = 3.0


def battery_shocks():
    return [
        ShockDistribution("normal", {"mu": 0.0, "sigma": 1.0}),
        ShockDistribution("normal", {"mu": 0.0, "sigma": 1.5}),
        ShockDistribution("logistic", {"mu": 0.0, "s": 1.0}),
        ShockDistribution("gumbel", {"mu": 0.0, "beta": 1.0}),
        ShockDistribution("uniform", {"a": -3.0, "b": 3.0}),
    ]


def battery_csfs():
    return [
        ContestSuccess("tullock", {}),
        ContestSuccess("power-tullock", {"r": 0.5}),
        ContestSuccess("power-tullock", {"r": 0.8}),
    ]


def random_discrete_prior(rng: np.random.Generator, upper: float = SUPPORT_MAX) -> DiscretePrior:
    k = int(rng.integers(2, 6))
    points = rng.uniform(0.0, upper, k)
    if rng.random() < 0.3:
        points[0] = 0.0
    masses = rng.dirichlet(np.ones(k))
    return DiscretePrior(points, masses)


@dataclass(frozen=True)
class Fixture:
    name: str
    config: GameConfig


def fixture_battery(seed: int = BATTERY_SEED, priors_per_cell: int = 3, continuous: bool = True) -> list[Fixture]:
    """Priors x CSFs x q_I grid x shocks.

    The negexp shock is paired only with priors whose support lies below q_I,
    so every posterior mean minus q_I stays on the strictly increasing branch.
    """
    rng = np.random.default_rng(seed)
    out = []
    for q_I in Q_I_GRID:
        for ci, csf in enumerate(battery_csfs()):
            for shock in battery_shocks():
                for j in range(priors_per_cell):
                    prior = random_discrete_prior(rng)
                    tag = f"discrete{j}/{shock.family}{dict(shock.params)}/{csf.family}{ci}/q_I={q_I}"
                    out.append(Fixture(tag, GameConfig(q_I, prior, shock, csf)))
            negexp = ShockDistribution("negexp", {})
            for j in range(2):
                prior = random_discrete_prior(rng, upper=0.9 * q_I)
                out.append(Fixture(f"discrete{j}/negexp/{csf.family}{ci}/q_I={q_I}",
                                   GameConfig(q_I, prior, negexp, csf)))
    if continuous:
        priors = [
            ContinuousPrior("gamma", {"shape": 2.0, "scale": 0.5}),
            ContinuousPrior("lognormal", {"mu": 0.0, "sigma": 0.5}),
        ]
        shocks = [battery_shocks()[0], battery_shocks()[2]]
        for prior in priors:
            for ci, csf in enumerate(battery_csfs()):
                for shock in shocks:
                    for q_I in (0.5, 1.0):
                        out.append(Fixture(f"{prior.family}/{shock.family}/{csf.family}{ci}/q_I={q_I}",
                                           GameConfig(q_I, prior, shock, csf)))
    return out
