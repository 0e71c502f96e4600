"""Monte Carlo replay of the election: quality draw, debate outcome, shock, vote.

Trials are split into fixed-size chunks, each seeded from ``(seed, chunk index)``,
so results do not depend on how many threads run the chunks.
"""

from __future__ import annotations

import csv
import io
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass

import numpy as np

from .errors import ConfigError
from .model import GameConfig
from .payoffs import BeliefState, challenger_debate_payoff, incumbent_debate_payoff, no_debate_payoff
from .posterior import conditional_means

SCENARIOS = ("debate-ex-ante", "debate-conditional", "no-debate")
CHUNK = 65536
SEED_MAX = 2**64 - 1
Z_BAND = 4.0
MIN_CONCLUSIVE_N = 100
PROBE_QUANTILES = (0.1, 0.3, 0.5, 0.7, 0.9)


@dataclass(frozen=True)
class SimulationSpec:
    scenario: str
    n: int
    seed: int = 0
    q_C: float | None = None

    def __post_init__(self):
        if self.scenario not in SCENARIOS:
            raise ConfigError(f"unknown scenario {self.scenario!r}; expected one of {SCENARIOS}", "scenario")
        if isinstance(self.n, bool) or not isinstance(self.n, (int, np.integer)) or self.n < 1:
            raise ConfigError(f"number of trials must be a positive integer, got {self.n!r}", "n")
        if isinstance(self.seed, bool) or not isinstance(self.seed, (int, np.integer)) or not 0 <= self.seed <= SEED_MAX:
            raise ConfigError(f"seed must be an unsigned 64-bit integer, got {self.seed!r}", "seed")
        if self.scenario == "debate-conditional":
            if self.q_C is None or not math.isfinite(self.q_C) or self.q_C < 0:
                raise ConfigError("debate-conditional needs a finite nonnegative q_C", "q_C")
        elif self.q_C is not None:
            raise ConfigError(f"q_C only applies to debate-conditional, not {self.scenario}", "q_C")


@dataclass(frozen=True)
class SimulationResult:
    scenario: str
    estimate: float
    stderr: float
    n: int
    seed: int
    challenger_wins: int
    debates_won: int
    q_C: float | None = None

    def to_dict(self):
        return asdict(self)


def _chunk_counts(k, size, spec: SimulationSpec, config: GameConfig, posterior):
    rng = np.random.Generator(np.random.PCG64(np.random.SeedSequence(spec.seed, spawn_key=(k,))))
    if spec.scenario == "no-debate":
        q_el = np.full(size, config.prior.mean)
        won = 0
    else:
        q = np.full(size, spec.q_C) if spec.q_C is not None else config.prior.sample(rng, size)
        wins_debate = rng.random(size) < np.asarray(config.theta(q), dtype=float)
        q_el = np.where(wins_debate, posterior[0], posterior[1])
        won = int(wins_debate.sum())
    eps = config.shock.sample(rng, size)
    # Ties go to the incumbent: the challenger needs a strict advantage.
    return int(np.count_nonzero(q_el - config.q_I > eps)), won


def simulate_election(spec: SimulationSpec, config: GameConfig, workers: int | None = None) -> SimulationResult:
    """Win frequency of the challenger over ``spec.n`` simulated elections."""
    posterior = None
    if spec.scenario != "no-debate":
        _, m_win, m_loss = conditional_means(config.prior, config.q_I, config.csf, config.numerics)
        posterior = (m_win, m_loss)
    sizes = [min(CHUNK, spec.n - start) for start in range(0, spec.n, CHUNK)]

    def run(k):
        return _chunk_counts(k, sizes[k], spec, config, posterior)

    if workers and workers > 1 and len(sizes) > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            counts = list(pool.map(run, range(len(sizes))))
    else:
        counts = [run(k) for k in range(len(sizes))]
    wins = sum(c[0] for c in counts)
    debates = sum(c[1] for c in counts)
    est = wins / spec.n
    return SimulationResult(spec.scenario, est, math.sqrt(est * (1.0 - est) / spec.n), spec.n, int(spec.seed),
                            wins, debates, spec.q_C)


@dataclass(frozen=True)
class Comparison:
    name: str
    analytic: float
    estimate: float
    stderr: float
    status: str  # pass | fail | inconclusive

    def to_dict(self):
        return asdict(self)


@dataclass(frozen=True)
class OracleReport:
    n: int
    seed: int
    comparisons: tuple[Comparison, ...]
    simulations: tuple[SimulationResult, ...]

    @property
    def passed(self) -> bool:
        return all(c.status == "pass" for c in self.comparisons)

    @property
    def status(self) -> str:
        statuses = {c.status for c in self.comparisons}
        if "fail" in statuses:
            return "fail"
        return "inconclusive" if "inconclusive" in statuses else "pass"

    def to_dict(self):
        return {
            "n": self.n,
            "seed": self.seed,
            "status": self.status,
            "comparisons": [c.to_dict() for c in self.comparisons],
            "simulations": [s.to_dict() for s in self.simulations],
        }

    def counts_csv(self) -> str:
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(["scenario", "q_C", "n", "seed", "challenger_wins", "debates_won"])
        for s in self.simulations:
            writer.writerow([s.scenario, "" if s.q_C is None else repr(s.q_C), s.n, s.seed,
                             s.challenger_wins, s.debates_won])
        return buf.getvalue()


def derived_seed(seed: int, index: int) -> int:
    return int(np.random.SeedSequence((seed, index)).generate_state(1, np.uint64)[0])


def _compare(name, analytic, estimate, n):
    stderr = math.sqrt(estimate * (1.0 - estimate) / n)
    if n < MIN_CONCLUSIVE_N:
        status = "inconclusive"
    else:
        # A zero-variance sample still carries resolution 1/n.
        band = Z_BAND * max(stderr, 1.0 / n)
        status = "pass" if abs(estimate - analytic) <= band else "fail"
    return Comparison(name, float(analytic), float(estimate), stderr, status)


def oracle_check(config: GameConfig, n: int, seed: int, workers: int | None = None) -> OracleReport:
    """Compare analytic payoffs and the debate-win mass with simulated frequencies.

    Each estimate must lie within 4 standard errors of its analytic value;
    with fewer than 100 trials every comparison is marked inconclusive.
    """
    win, _, _ = conditional_means(config.prior, config.q_I, config.csf, config.numerics)
    full = BeliefState.full(config.prior)
    probes = [float(config.prior.ppf(u)) for u in PROBE_QUANTILES]
    specs = [("no-debate", None), ("debate-ex-ante", None)] + [("debate-conditional", q) for q in probes]
    sims = tuple(simulate_election(SimulationSpec(s, n, derived_seed(seed, i), q), config, workers)
                 for i, (s, q) in enumerate(specs))

    comparisons = [
        _compare("no_debate_payoff", no_debate_payoff(full, config), sims[0].estimate, n),
        _compare("incumbent_debate_payoff", incumbent_debate_payoff(config), sims[1].estimate, n),
        _compare("win_mass", win, sims[1].debates_won / n, n),
    ]
    for u, q, sim in zip(PROBE_QUANTILES, probes, sims[2:]):
        analytic = challenger_debate_payoff(q, full, config)
        comparisons.append(_compare(f"challenger_debate_payoff[q{u:g}={q:.6g}]", analytic, sim.estimate, n))
    return OracleReport(n, int(seed), tuple(comparisons), sims)
