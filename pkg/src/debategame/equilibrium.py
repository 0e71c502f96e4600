"""Equilibrium classification, the pooling-consistency scan and ordered-announcement games."""

from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .errors import ResolutionError
from .model import DiscretePrior, GameConfig
from .payoffs import (
    BeliefState,
    challenger_debate_payoff,
    incumbent_debate_payoff,
    no_debate_payoff,
    off_path_belief,
)

DEBATE, NO_DEBATE, KNIFE_EDGE = "Debate", "NoDebate", "KnifeEdge"
SEQUENCES = ("simultaneous", "incumbent-first", "challenger-first")
DISCRETIZATION_POINTS = 256
MIN_SCAN_POINTS = 64
INVARIANCE_TOL = 1e-9


@dataclass(frozen=True)
class EquilibriumOutcome:
    regime: str
    incumbent_announcement: str  # "P", "NP" or "P|NP" on the knife edge
    challenger_rule: str
    incumbent_payoff: float
    challenger_ex_ante_payoff: float
    margin: float
    debate_value: float
    no_debate_value: float

    def to_dict(self):
        return {
            "regime": self.regime,
            "announcements": {"incumbent": self.incumbent_announcement, "challenger": self.challenger_rule},
            "incumbent_payoff": self.incumbent_payoff,
            "challenger_ex_ante_payoff": self.challenger_ex_ante_payoff,
            "margin": self.margin,
            "debate_value": self.debate_value,
            "no_debate_value": self.no_debate_value,
        }


def regime_for(margin: float, tie_tol: float) -> str:
    if margin < -tie_tol:
        return DEBATE
    if margin > tie_tol:
        return NO_DEBATE
    return KNIFE_EDGE


def classify_equilibrium(config: GameConfig) -> EquilibriumOutcome:
    """Debate iff the mandatory-debate value is below the no-debate value.

    Uses only ex-ante quantities; the challenger announces P in every regime.
    """
    debate = incumbent_debate_payoff(config)
    no_debate = no_debate_payoff(BeliefState.full(config.prior), config)
    margin = debate - no_debate
    regime = regime_for(margin, config.numerics.tie_tol)
    if regime == DEBATE:
        incumbent, value = "P", debate
    elif regime == NO_DEBATE:
        incumbent, value = "NP", no_debate
    else:
        incumbent, value = "P|NP", no_debate
    return EquilibriumOutcome(regime, incumbent, "P for all q_C", 1.0 - value, value, margin, debate, no_debate)


def incumbent_best_reply(challenger_announcement: str, config: GameConfig) -> str:
    """Incumbent's reply ("P", "NP" or "P|NP") to a pooled challenger announcement.

    Against NP the voter reads the refusal through the off-path policy.
    """
    tol = config.numerics.tie_tol
    no_debate = no_debate_payoff(BeliefState.full(config.prior), config)
    if challenger_announcement == "P":
        accept = incumbent_debate_payoff(config)
    elif challenger_announcement == "NP":
        accept = no_debate_payoff(off_path_belief(config), config)
    else:
        raise ValueError(f"announcement must be P or NP, got {challenger_announcement!r}")
    if accept < no_debate - tol:
        return "P"
    if accept > no_debate + tol:
        return "NP"
    return "P|NP"


# --------------------------------------------------------------------------- pooling scan


@dataclass(frozen=True)
class ThresholdStrategy:
    """Challenger's reply to the incumbent's P: always-P, always-NP, or P iff q_C >= q_star."""

    kind: str
    q_star: float | None = None

    def describe(self) -> str:
        return self.kind if self.kind != "threshold" else f"threshold({self.q_star:g})"


@dataclass(frozen=True)
class StrategyCheck:
    strategy: ThresholdStrategy
    belief_after_P: str
    mean_after_P: float
    belief_after_NP: str
    mean_after_NP: float
    prefers_P_from: float | None  # lowest type strictly preferring P (None if no type does)
    n_prefer_P: int
    n_prefer_NP: int
    consistent: bool
    deviating_witness: float | None
    witness_gain: float

    def to_dict(self):
        return {
            "strategy": self.strategy.describe(),
            "belief_after_P": self.belief_after_P,
            "mean_after_P": self.mean_after_P,
            "belief_after_NP": self.belief_after_NP,
            "mean_after_NP": self.mean_after_NP,
            "prefers_P_from": self.prefers_P_from,
            "n_prefer_P": self.n_prefer_P,
            "n_prefer_NP": self.n_prefer_NP,
            "consistent": self.consistent,
            "deviating_witness": self.deviating_witness,
            "witness_gain": self.witness_gain,
        }


@dataclass(frozen=True)
class ConsistencyReport:
    checks: tuple[StrategyCheck, ...]
    n_types: int

    @property
    def consistent_rules(self) -> list[str]:
        return [c.strategy.describe() for c in self.checks if c.consistent]

    @property
    def only_always_P(self) -> bool:
        return self.consistent_rules == ["always-P"]

    def to_dict(self):
        return {
            "n_types": self.n_types,
            "consistent_rules": self.consistent_rules,
            "only_always_P": self.only_always_P,
            "checks": [c.to_dict() for c in self.checks],
        }


def type_grid(config: GameConfig, n: int = DISCRETIZATION_POINTS) -> DiscretePrior:
    """The prior as a finite type set: itself if discrete, else n mass-matched points."""
    if config.prior.is_discrete:
        return config.prior
    return config.prior.discretize(n, config.numerics)


class _TypeSpace:
    """Debate and no-debate values for every type under subset beliefs."""

    def __init__(self, config: GameConfig, types: DiscretePrior):
        self.config = config
        self.q = np.asarray(types.points)
        self.m = np.asarray(types.masses)
        self.theta = np.asarray(config.theta(self.q), dtype=float)
        self.G = config.G
        self.q_I = config.q_I
        self.tol = config.numerics.tie_tol

    def mean(self, mask):
        w = self.m[mask]
        return float(np.dot(w, self.q[mask]) / w.sum())

    def debate_payoffs(self, mask):
        """Payoff of every type from a debate when the voter's prior is the mask subset."""
        w, q, t = self.m[mask], self.q[mask], self.theta[mask]
        win = float(np.dot(w, t) / w.sum())
        if win <= 0.0:
            # Only zero-quality types: a win is impossible, both posteriors are the subset mean.
            g_win = g_loss = float(self.G(self.mean(mask) - self.q_I))
        else:
            m_win = float(np.dot(w * t, q) / np.dot(w, t))
            m_loss = float(np.dot(w * (1 - t), q) / np.dot(w, 1 - t))
            g_win, g_loss = float(self.G(m_win - self.q_I)), float(self.G(m_loss - self.q_I))
        return self.theta * g_win + (1.0 - self.theta) * g_loss

    def preference(self, u_P, u_NP):
        """+1 strictly prefers P, -1 strictly prefers NP, 0 indifferent (within tie_tol)."""
        diff = u_P - u_NP
        return np.where(diff > self.tol, 1, np.where(diff < -self.tol, -1, 0))

    def check(self, strategy, plays_P, u_P, u_NP, after_P, after_NP):
        pref = self.preference(u_P, np.broadcast_to(u_NP, u_P.shape))
        if np.any(np.diff(pref) < 0):
            raise ResolutionError(
                f"best-response set for {strategy.describe()} is not monotone in quality; refine the type grid")
        gain = np.where(plays_P, u_NP - u_P, u_P - u_NP)
        deviators = gain > self.tol
        if deviators.any():
            k = int(np.argmax(np.where(deviators, gain, -np.inf)))
            witness, best = float(self.q[k]), float(gain[k])
        else:
            witness, best = None, 0.0
        strict_P = pref > 0
        return StrategyCheck(
            strategy=strategy,
            belief_after_P=after_P[0], mean_after_P=after_P[1],
            belief_after_NP=after_NP[0], mean_after_NP=after_NP[1],
            prefers_P_from=float(self.q[int(np.argmax(strict_P))]) if strict_P.any() else None,
            n_prefer_P=int(strict_P.sum()), n_prefer_NP=int((pref < 0).sum()),
            consistent=witness is None, deviating_witness=witness, witness_gain=best,
        )


def _check_always_P(space: _TypeSpace) -> StrategyCheck:
    everyone = np.ones(space.q.size, dtype=bool)
    refusal = off_path_belief(space.config)
    u_P = space.debate_payoffs(everyone)
    u_NP = float(space.G(refusal.mean - space.q_I))
    return space.check(ThresholdStrategy("always-P"), everyone, u_P, u_NP,
                       ("full prior", space.mean(everyone)), (f"off-path {refusal.describe()}", refusal.mean))


def _check_threshold(space: _TypeSpace, k: int) -> StrategyCheck:
    plays_P = np.arange(space.q.size) >= k
    u_P = space.debate_payoffs(plays_P)
    mean_NP = space.mean(~plays_P)
    u_NP = float(space.G(mean_NP - space.q_I))
    q_star = float(space.q[k])
    return space.check(ThresholdStrategy("threshold", q_star), plays_P, u_P, u_NP,
                       (f"left-truncated({q_star:g})", space.mean(plays_P)),
                       (f"right-truncated(<{q_star:g})", mean_NP))


def _check_always_NP(space: _TypeSpace) -> StrategyCheck:
    """P is off path. Try the beliefs 'quality at least q_low' from q_low = lowest type
    upward and keep the first one under which some type in its support gains by P."""
    nobody = np.zeros(space.q.size, dtype=bool)
    everyone = ~nobody
    u_NP = float(space.G(space.mean(everyone) - space.q_I))
    strategy = ThresholdStrategy("always-NP")
    last = None
    for j in range(space.q.size):
        support = np.arange(space.q.size) >= j
        u_P = space.debate_payoffs(support)
        after_P = (f"left-truncated({space.q[j]:g})" if j else "full prior", space.mean(support))
        result = space.check(strategy, nobody, np.where(support, u_P, -np.inf), u_NP,
                             after_P, ("full prior", space.mean(everyone)))
        if not result.consistent:
            return result
        last = result
    return last


def threshold_consistency_scan(config: GameConfig, grid: Sequence[float] | None = None,
                               max_workers: int | None = None) -> ConsistencyReport:
    """Check which challenger replies to the incumbent's P are consistent with beliefs.

    Candidates are always-P, always-NP and threshold rules ``P iff q_C >= q_star``.
    With ``grid=None`` every split of the type set is tried; otherwise each
    ``q_star`` in ``grid`` is mapped to the split it induces (duplicates merged).
    Continuous priors are replaced by 256 mass-matched points.
    """
    types = type_grid(config)
    if not config.prior.is_discrete and types.points.size < MIN_SCAN_POINTS:
        raise ResolutionError(f"discretized prior has {types.points.size} points, need {MIN_SCAN_POINTS}")
    space = _TypeSpace(config, types)
    n = space.q.size
    if grid is None:
        splits = list(range(1, n))
    else:
        splits = sorted({int(np.searchsorted(space.q, float(q), side="left")) for q in grid})
        splits = [k for k in splits if 0 < k < n]

    tasks = [lambda: _check_always_P(space)]
    tasks += [lambda k=k: _check_threshold(space, k) for k in splits]
    tasks.append(lambda: _check_always_NP(space))
    if max_workers and max_workers > 1:
        with ThreadPoolExecutor(max_workers=max_workers) as pool:
            checks = list(pool.map(lambda task: task(), tasks))
    else:
        checks = [task() for task in tasks]
    return ConsistencyReport(tuple(checks), n)


# --------------------------------------------------------------------------- ordered announcements


@dataclass(frozen=True)
class SequenceGameResult:
    sequence: str
    equilibria: frozenset
    debate_occurs: bool | None  # None when equilibria with and without a debate coexist
    payoffs: dict = field(hash=False)  # (incumbent, challenger) pair -> (incumbent payoff, challenger ex-ante)
    knife_edge: bool = False

    def to_dict(self):
        return {
            "sequence": self.sequence,
            "equilibria": [list(pair) for pair in sorted(self.equilibria)],
            "debate_occurs": self.debate_occurs,
            "knife_edge": self.knife_edge,
            "payoffs": {f"{i},{c}": {"incumbent": v[0], "challenger": v[1]}
                        for (i, c), v in sorted(self.payoffs.items())},
        }


class _Stage:
    """Pooled-strategy payoffs with beliefs held at the prior after any announcement.

    Two exceptions, both at a node where answering P would start a debate: an
    off-path refusal is read through the off-path policy, and a pooled refusal
    must survive the pooling-consistency test (deviators to P believed to be at
    least some quality), exactly as in :func:`threshold_consistency_scan`.
    """

    def __init__(self, config: GameConfig):
        types = type_grid(config)
        self.tol = config.numerics.tie_tol
        self.debate = incumbent_debate_payoff(config)
        self.no_debate = no_debate_payoff(BeliefState.full(config.prior), config)
        self.refused = no_debate_payoff(off_path_belief(config), config)
        self.u_debate = np.asarray(challenger_debate_payoff(types.points, BeliefState.full(config.prior), config))
        self.pooled_refusal_ok = _check_always_NP(_TypeSpace(config, types)).consistent

    def refusal_value(self, refusal_on_path: bool) -> float:
        return self.no_debate if refusal_on_path else self.refused

    def reply_to_P_ok(self, chosen: str) -> bool:
        """Is the pooled reply optimal once the incumbent has accepted a debate?"""
        if chosen == "NP":
            return self.pooled_refusal_ok
        return self.challenger_ok("P", {"P": self.u_debate, "NP": self.refused})

    def incumbent_ok(self, chosen: str, options: dict) -> bool:
        return options[chosen] <= min(options.values()) + self.tol

    def challenger_ok(self, chosen: str, options: dict) -> bool:
        other = "NP" if chosen == "P" else "P"
        mine = np.broadcast_to(options[chosen], self.u_debate.shape)
        theirs = np.broadcast_to(options[other], self.u_debate.shape)
        return bool(np.all(mine >= theirs - self.tol))

    def outcome_payoffs(self, pair):
        value = self.debate if pair == ("P", "P") else self.no_debate
        return (1.0 - value, value)


def _simultaneous(stage: _Stage):
    found = set()
    for i in ("P", "NP"):
        for c in ("P", "NP"):
            def eg(j):
                return stage.debate if (j, c) == ("P", "P") else stage.no_debate

            if not stage.incumbent_ok(i, {"P": eg("P"), "NP": eg("NP")}):
                continue
            # The challenger's rule must also be optimal where the answer decides whether a
            # debate is held, i.e. against the incumbent's P, whatever the incumbent plays.
            if stage.reply_to_P_ok(c):
                found.add((i, c))
    return found


def _incumbent_first(stage: _Stage):
    found = set()
    for i in ("P", "NP"):
        for reply_P in ("P", "NP"):
            for reply_NP in ("P", "NP"):
                if not stage.reply_to_P_ok(reply_P):
                    continue
                eg = {"P": stage.debate if reply_P == "P" else stage.no_debate, "NP": stage.no_debate}
                if stage.incumbent_ok(i, eg):
                    found.add((i, reply_P if i == "P" else reply_NP))
    return found


def _challenger_first(stage: _Stage):
    found = set()
    for c in ("P", "NP"):
        for reply_P in ("P", "NP"):
            for reply_NP in ("P", "NP"):
                if not stage.incumbent_ok(reply_P, {"P": stage.debate, "NP": stage.no_debate}):
                    continue
                at_NP = {"P": stage.refusal_value(c == "NP"), "NP": stage.no_debate}
                if not stage.incumbent_ok(reply_NP, at_NP):
                    continue
                if c == "NP" and reply_P == "P":
                    # Answering P would start a debate, so the pooled refusal must pass the test.
                    ok = stage.pooled_refusal_ok
                else:
                    options = {
                        "P": stage.u_debate if reply_P == "P" else stage.no_debate,
                        "NP": at_NP[reply_NP],
                    }
                    ok = stage.challenger_ok(c, options)
                if ok:
                    found.add((reply_P if c == "P" else reply_NP, c))
    return found


_SOLVERS = {"simultaneous": _simultaneous, "incumbent-first": _incumbent_first,
            "challenger-first": _challenger_first}


def sequential_equilibria(config: GameConfig, sequence: str) -> SequenceGameResult:
    """All pure pooled equilibrium announcement pairs ``(incumbent, challenger)``
    for the given order, found by backward induction over the two stages."""
    if sequence not in _SOLVERS:
        raise ValueError(f"sequence must be one of {SEQUENCES}, got {sequence!r}")
    return _solve(_Stage(config), sequence)


def _solve(stage: _Stage, sequence: str) -> SequenceGameResult:
    pairs = frozenset(_SOLVERS[sequence](stage))
    debates = {pair == ("P", "P") for pair in pairs}
    debate_occurs = debates.pop() if len(debates) == 1 else None
    knife = regime_for(stage.debate - stage.no_debate, stage.tol) == KNIFE_EDGE
    return SequenceGameResult(sequence, pairs, debate_occurs,
                              {pair: stage.outcome_payoffs(pair) for pair in pairs}, knife)


@dataclass(frozen=True)
class InvarianceReport:
    passed: bool
    refused: bool
    reason: str
    results: tuple[SequenceGameResult, ...]
    max_payoff_gap: float

    def to_dict(self):
        return {
            "passed": self.passed,
            "refused": self.refused,
            "reason": self.reason,
            "max_payoff_gap": self.max_payoff_gap,
            "results": [r.to_dict() for r in self.results],
        }


def sequence_invariance_check(config: GameConfig) -> InvarianceReport:
    """Debate occurrence and equilibrium payoffs agree across all announcement orders."""
    stage = _Stage(config)
    if regime_for(stage.debate - stage.no_debate, stage.tol) == KNIFE_EDGE:
        return InvarianceReport(False, True, "knife-edge regime: the incumbent is indifferent", (), float("nan"))
    results = tuple(_solve(stage, s) for s in SEQUENCES)
    payoffs = [v for r in results for v in r.payoffs.values()]
    if not payoffs or any(not r.equilibria for r in results):
        return InvarianceReport(False, False, "some order has no equilibrium", results, float("nan"))
    gap = max(max(abs(a[0] - b[0]), abs(a[1] - b[1])) for a in payoffs for b in payoffs)
    occurs = {r.debate_occurs for r in results}
    passed = len(occurs) == 1 and None not in occurs and gap <= INVARIANCE_TOL
    reason = "ok" if passed else "debate occurrence or payoffs differ across orders"
    return InvarianceReport(passed, False, reason, results, gap)
