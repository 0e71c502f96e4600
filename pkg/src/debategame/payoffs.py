"""Expected election-win probabilities for each announcement profile."""

from __future__ import annotations

import csv
import io
from dataclasses import dataclass
from typing import Mapping

import numpy as np

from .errors import ConfigError
from .model import ChallengerPrior, DiscretePrior, GameConfig, OffPathBeliefPolicy
from .posterior import conditional_means

ANNOUNCEMENTS = ("P", "NP")


@dataclass(frozen=True)
class BeliefState:
    """Voter belief over challenger quality; ``mean`` is the Election-Day expectation."""

    shape: str
    distribution: ChallengerPrior
    param: float | None = None

    @classmethod
    def full(cls, prior: ChallengerPrior) -> "BeliefState":
        return cls("full-prior", prior)

    @classmethod
    def left_truncated(cls, prior: ChallengerPrior, q_low: float) -> "BeliefState":
        """Quality believed to be at least ``q_low``."""
        return cls("left-truncated", prior.truncated(lower=q_low), float(q_low))

    @classmethod
    def right_truncated(cls, prior: ChallengerPrior, q_high: float) -> "BeliefState":
        """Quality believed to be at most ``q_high``."""
        return cls("right-truncated", prior.truncated(upper=q_high), float(q_high))

    @classmethod
    def point_mass(cls, q0: float) -> "BeliefState":
        if q0 < 0:
            raise ConfigError("quality must be nonnegative", "value")
        return cls("point-mass", DiscretePrior([q0], [1.0], require_positive_mean=False), float(q0))

    @property
    def mean(self) -> float:
        if self.shape == "point-mass":
            return self.param
        return self.distribution.mean

    def describe(self) -> str:
        return self.shape if self.param is None else f"{self.shape}({self.param:g})"


def off_path_belief(config: GameConfig, policy: OffPathBeliefPolicy | None = None) -> BeliefState:
    """Belief after the challenger answers the incumbent's P with NP."""
    policy = policy or config.off_path
    if policy.rule == "full-prior":
        return BeliefState.full(config.prior)
    if policy.rule == "point-mass-at":
        return BeliefState.point_mass(policy.value)
    return BeliefState.right_truncated(config.prior, policy.value)


def no_debate_payoff(belief: BeliefState, config: GameConfig) -> float:
    """Challenger's win probability when no debate is held."""
    return float(config.G(belief.mean - config.q_I))


def _outcome_values(belief: BeliefState, config: GameConfig) -> tuple[float, float]:
    if belief.shape == "point-mass" and belief.param > 0:
        value = float(config.G(belief.param - config.q_I))
        return value, value
    _, m_win, m_loss = conditional_means(belief.distribution, config.q_I, config.csf, config.numerics)
    return float(config.G(m_win - config.q_I)), float(config.G(m_loss - config.q_I))


def debate_payoff_curve(belief: BeliefState, config: GameConfig):
    """``q_C -> challenger_debate_payoff(q_C, belief, config)`` with the posterior fixed once.

    Use this when the payoff is evaluated many times, e.g. inside a quadrature.
    """
    g_win, g_loss = _outcome_values(belief, config)

    def curve(q_C):
        t = np.asarray(config.theta(q_C), dtype=float)
        out = t * g_win + (1.0 - t) * g_loss
        return float(out) if out.ndim == 0 else out

    return curve


def challenger_debate_payoff(q_C, belief: BeliefState, config: GameConfig):
    """Win probability of a type-``q_C`` challenger when a debate is held.

    Vectorized over ``q_C``. The voter's posterior means are taken under
    ``belief`` (the full prior gives the mandatory-debate value).
    """
    return debate_payoff_curve(belief, config)(q_C)


def incumbent_debate_payoff(config: GameConfig) -> float:
    """Challenger's ex-ante win probability under a mandatory debate."""
    win, m_win, m_loss = conditional_means(config.prior, config.q_I, config.csf, config.numerics)
    G, q_I = config.G, config.q_I
    return float(win * G(m_win - q_I) + (1.0 - win) * G(m_loss - q_I))


def debate_margin(config: GameConfig) -> float:
    """Mandatory-debate value minus the no-debate value (negative favours a debate)."""
    return incumbent_debate_payoff(config) - no_debate_payoff(BeliefState.full(config.prior), config)


@dataclass(frozen=True)
class PayoffCell:
    incumbent: float
    challenger: float
    beliefs: str
    ex_ante: bool


@dataclass(frozen=True)
class PayoffMatrix:
    cells: Mapping[tuple[str, str], PayoffCell]
    q_C_probe: float | None
    off_path_mean: float
    margin: float
    refusal_below_debate_ex_ante: bool
    refusal_below_all_types: bool

    def cell(self, incumbent: str, challenger: str) -> PayoffCell:
        return self.cells[(incumbent, challenger)]

    def to_dict(self) -> dict:
        return {
            "q_C_probe": "ex-ante" if self.q_C_probe is None else self.q_C_probe,
            "off_path_mean": self.off_path_mean,
            "margin": self.margin,
            "refusal_below_debate_ex_ante": self.refusal_below_debate_ex_ante,
            "refusal_below_all_types": self.refusal_below_all_types,
            "cells": [
                {"incumbent": i, "challenger": c, "incumbent_payoff": cell.incumbent,
                 "challenger_payoff": cell.challenger, "beliefs": cell.beliefs, "ex_ante": cell.ex_ante}
                for (i, c), cell in self.cells.items()
            ],
        }

    def to_csv(self) -> str:
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(["incumbent", "challenger", "incumbent_payoff", "challenger_payoff", "beliefs"])
        for (i, c), cell in self.cells.items():
            writer.writerow([i, c, repr(cell.incumbent), repr(cell.challenger), cell.beliefs])
        return buf.getvalue()


def payoff_matrix(config: GameConfig, q_C_probe: float | None = None) -> PayoffMatrix:
    """The 2x2 table of (incumbent, challenger) win probabilities.

    Challenger entries are conditional on ``q_C_probe`` when given, ex-ante
    otherwise. Raises ConfigError if the off-path policy does not push the
    refusing challenger's expected quality below the prior mean (the
    full-prior policy is exempt and only flagged).
    """
    prior_belief = BeliefState.full(config.prior)
    refusal = off_path_belief(config)
    mean = config.prior.mean
    if config.off_path.rule != "full-prior" and not refusal.mean < mean:
        raise ConfigError(
            f"off-path belief mean {refusal.mean!r} is not below the prior mean {mean!r}", "off_path")

    debate = incumbent_debate_payoff(config)
    no_debate = no_debate_payoff(prior_belief, config)
    refused = no_debate_payoff(refusal, config)
    if q_C_probe is None:
        challenger_pp = debate
    else:
        challenger_pp = float(challenger_debate_payoff(q_C_probe, prior_belief, config))
    weakest = float(challenger_debate_payoff(0.0, prior_belief, config))

    cells = {
        ("P", "P"): PayoffCell(1.0 - debate, challenger_pp, "debate posteriors from full prior",
                               q_C_probe is None),
        ("P", "NP"): PayoffCell(1.0 - refused, refused, f"off-path {refusal.describe()}", True),
        ("NP", "P"): PayoffCell(1.0 - no_debate, no_debate, "full prior", True),
        ("NP", "NP"): PayoffCell(1.0 - no_debate, no_debate, "full prior", True),
    }
    return PayoffMatrix(
        cells=cells,
        q_C_probe=q_C_probe,
        off_path_mean=refusal.mean,
        margin=debate - no_debate,
        refusal_below_debate_ex_ante=bool(refused < debate and refusal.mean < mean),
        refusal_below_all_types=bool(refused < weakest and refusal.mean < mean),
    )
