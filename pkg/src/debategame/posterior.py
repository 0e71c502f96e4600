"""Voter's Bayesian update after a mandatory debate."""

from __future__ import annotations

from dataclasses import asdict, dataclass

import numpy as np
from scipy.optimize import brentq

from .errors import DegeneratePriorError, DomainError, InvariantError, NumericError
from .model import ChallengerPrior, ContestSuccess, GameConfig, NumericSettings

MIXTURE_TOL = 1e-8
CURVATURE_SAMPLES = 64
CURVATURE_TOL = 1e-12
AFFINE_JENSEN_TOL = 1e-10


@dataclass(frozen=True)
class PosteriorSummary:
    win_mass: float
    mean_given_win: float
    mean_given_loss: float
    crossing_quality: float
    prior_mean: float

    def to_dict(self):
        return asdict(self)


def conditional_means(prior: ChallengerPrior, q_I: float, csf: ContestSuccess,
                      settings: NumericSettings) -> tuple[float, float, float]:
    """(win mass, mean quality given a debate win, mean given a loss) under ``prior``.

    Raises DegeneratePriorError when the win mass is within ``tie_tol`` of 0 or 1.
    """
    def theta(q):
        return csf.theta(q, q_I)

    win = prior.expect(theta, settings)
    if not settings.tie_tol < win < 1.0 - settings.tie_tol:
        raise DegeneratePriorError(f"debate win mass {win!r} is degenerate; cannot condition on the outcome")
    mean_win = prior.expect(lambda q: theta(q) * q, settings) / win
    mean_loss = prior.expect(lambda q: (1.0 - theta(q)) * q, settings) / (1.0 - win)
    return win, mean_win, mean_loss


def win_mass(config: GameConfig) -> float:
    return conditional_means(config.prior, config.q_I, config.csf, config.numerics)[0]


def _posterior_density(q, config: GameConfig, won: bool, win: float | None):
    q = np.asarray(q, dtype=float)
    if np.any(q < 0):
        raise DomainError("quality must be nonnegative")
    w = win_mass(config) if win is None else win
    theta = np.asarray(config.theta(q))
    prior = np.asarray(config.prior.density(q))
    out = prior * theta / w if won else prior * (1.0 - theta) / (1.0 - w)
    return float(out) if out.ndim == 0 else out


def posterior_density_win(q, config: GameConfig, win: float | None = None):
    """Posterior density (mass, for discrete priors) at ``q`` after a debate win.

    Pass ``win`` (the win mass) to skip recomputing it on repeated calls.
    """
    return _posterior_density(q, config, True, win)


def posterior_density_loss(q, config: GameConfig, win: float | None = None):
    return _posterior_density(q, config, False, win)


def crossing_quality(config: GameConfig, win: float | None = None) -> float:
    """Quality q_hat in (0, prior mean) where theta(q_hat, q_I) equals the win mass.

    Below q_hat a debate win lowers the posterior weight relative to the
    prior; above it the weight rises.
    """
    if win is None:
        win = win_mass(config)
    mean = config.prior.mean
    lo, hi = -win, float(config.theta(mean)) - win
    if not (lo < 0 < hi):
        raise NumericError(f"no sign change of theta(q) - win_mass on [0, {mean}] "
                           f"(endpoint values {lo!r}, {hi!r}); theta is not concave enough")
    return brentq(lambda q: float(config.theta(q)) - win, 0.0, mean,
                  xtol=config.numerics.root_abs_tol, rtol=4 * np.finfo(float).eps, maxiter=500)


def posterior_means(config: GameConfig) -> PosteriorSummary:
    """Win mass, conditional means and crossing quality; checks their ordering."""
    win, m_win, m_loss = conditional_means(config.prior, config.q_I, config.csf, config.numerics)
    mean = config.prior.mean
    if config.prior.is_discrete and config.prior.points.size == 1:
        raise DegeneratePriorError("one-point prior: the debate outcome carries no information")
    if not m_win > mean > m_loss:
        raise InvariantError(f"posterior means out of order: {m_win!r}, {mean!r}, {m_loss!r}")
    gap = win * m_win + (1.0 - win) * m_loss - mean
    if abs(gap) > MIXTURE_TOL:
        raise InvariantError(f"mixture identity off by {gap!r}")
    q_hat = crossing_quality(config, win)
    if not 0 < q_hat < mean:
        raise InvariantError(f"crossing quality {q_hat!r} outside (0, {mean!r})")
    return PosteriorSummary(win, m_win, m_loss, q_hat, mean)


def classify_curvature(G, lo: float, hi: float, n: int = CURVATURE_SAMPLES, tol: float = CURVATURE_TOL) -> str:
    """Label G on [lo, hi] as 'affine', 'concave', 'convex' or 'mixed' from second differences."""
    x = np.linspace(lo, hi, n)
    d2 = np.diff(np.asarray(G(x), dtype=float), 2)
    neg, pos = bool(np.any(d2 < -tol)), bool(np.any(d2 > tol))
    if neg and pos:
        return "mixed"
    if neg:
        return "concave"
    if pos:
        return "convex"
    return "affine"


@dataclass(frozen=True)
class SignalCheckReport:
    ordering_holds: bool
    extreme_low: bool
    extreme_high: bool
    jensen_direction: str
    jensen_status: str  # holds | violated | not applicable
    probe_quality: float
    debate_value: float
    no_debate_value: float
    summary: PosteriorSummary | None

    def to_dict(self):
        out = asdict(self)
        out["summary"] = None if self.summary is None else self.summary.to_dict()
        return out

    @property
    def passed(self) -> bool:
        return (self.ordering_holds and self.extreme_low and self.extreme_high
                and self.jensen_status != "violated")


def check_posterior_signal(config: GameConfig) -> SignalCheckReport:
    """Posterior-mean ordering, extreme-type payoffs and the Jensen direction."""
    win, m_win, m_loss = conditional_means(config.prior, config.q_I, config.csf, config.numerics)
    mean, q_I, G = config.prior.mean, config.q_I, config.G
    ordering = bool(m_win > mean > m_loss)
    try:
        summary = posterior_means(config)
    except (InvariantError, NumericError):
        summary = None
    no_debate = float(G(mean - q_I))
    g_win, g_loss = float(G(m_win - q_I)), float(G(m_loss - q_I))

    def debate_payoff(q_C):
        t = float(config.theta(q_C))
        return t * g_win + (1.0 - t) * g_loss

    probe = 10.0 * config.prior.upper
    direction = classify_curvature(G, m_loss - q_I, m_win - q_I)
    debate = win * g_win + (1.0 - win) * g_loss
    if direction == "concave":
        status = "holds" if debate < no_debate else "violated"
    elif direction == "convex":
        status = "holds" if debate > no_debate else "violated"
    elif direction == "affine":
        status = "holds" if abs(debate - no_debate) <= AFFINE_JENSEN_TOL else "violated"
    else:
        status = "not applicable"
    return SignalCheckReport(
        ordering_holds=ordering,
        extreme_low=bool(debate_payoff(0.0) < no_debate),
        extreme_high=bool(debate_payoff(probe) > no_debate),
        jensen_direction=direction,
        jensen_status=status,
        probe_quality=probe,
        debate_value=debate,
        no_debate_value=no_debate,
        summary=summary,
    )
