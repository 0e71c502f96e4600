"""Whether a debate moves the challenger's win probability toward its full-information value."""

from __future__ import annotations

import csv
import io
from dataclasses import asdict, dataclass

import numpy as np
from scipy.optimize import brentq

from .model import GameConfig
from .posterior import conditional_means

INFORMATIVE, NOISY, BOUNDARY = "Informative", "Noisy", "Boundary"
SCAN_POINTS = 512
PROBE_FACTOR = 10.0
CONTINUITY_FACTOR = 10.0


@dataclass(frozen=True)
class InformativenessResult:
    q_C: float
    debate_error: float
    no_debate_error: float
    label: str

    def to_dict(self):
        return asdict(self)


class _ErrorCurves:
    """Vectorized debate / no-debate errors under the mandatory-debate posteriors."""

    def __init__(self, config: GameConfig):
        _, m_win, m_loss = conditional_means(config.prior, config.q_I, config.csf, config.numerics)
        G, q_I = config.G, config.q_I
        self.config = config
        self.g_win = float(G(m_win - q_I))
        self.g_loss = float(G(m_loss - q_I))
        self.no_debate = float(G(config.prior.mean - q_I))

    def errors(self, q_C):
        q_C = np.asarray(q_C, dtype=float)
        t = np.asarray(self.config.theta(q_C), dtype=float)
        truth = np.asarray(self.config.G(q_C - self.config.q_I), dtype=float)
        debate = t * self.g_win + (1.0 - t) * self.g_loss
        return np.abs(debate - truth), np.abs(self.no_debate - truth)

    def h(self, q_C):
        d, n = self.errors(q_C)
        return d - n


def label_for(debate_error: float, no_debate_error: float, tie_tol: float) -> str:
    if debate_error < no_debate_error - tie_tol:
        return INFORMATIVE
    if debate_error > no_debate_error + tie_tol:
        return NOISY
    return BOUNDARY


def classify_debate(q_C: float, config: GameConfig) -> InformativenessResult:
    d, n = _ErrorCurves(config).errors(q_C)
    d, n = float(d), float(n)
    return InformativenessResult(float(q_C), d, n, label_for(d, n, config.numerics.tie_tol))


def informativeness_sweep(config: GameConfig, q_values) -> list[InformativenessResult]:
    curves = _ErrorCurves(config)
    q = np.asarray(q_values, dtype=float)
    d, n = curves.errors(q)
    tol = config.numerics.tie_tol
    return [InformativenessResult(float(a), float(b), float(c), label_for(b, c, tol)) for a, b, c in zip(q, d, n)]


def sweep_csv(results) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(["q_C", "debate_error", "no_debate_error", "label"])
    for r in results:
        writer.writerow([repr(r.q_C), repr(r.debate_error), repr(r.no_debate_error), r.label])
    return buf.getvalue()


@dataclass(frozen=True)
class ThresholdPair:
    q_L: float | None
    q_H: float | None
    sign_change_points: tuple[float, ...]
    lower_branch_empty: bool
    upper_branch_empty: bool
    probe_bound: float
    continuity_ok: bool

    def to_dict(self):
        out = asdict(self)
        out["sign_change_points"] = list(self.sign_change_points)
        return out


def _roots(f, x, hx, xtol):
    """Roots of f in every grid cell where the sign of ``hx`` (negative vs not) changes."""
    neg = hx < 0
    roots = []
    for i in np.flatnonzero(neg[:-1] != neg[1:]):
        a, b = float(x[i]), float(x[i + 1])
        fa, fb = f(a), f(b)
        if fa == 0.0:
            roots.append(a)
        elif fb == 0.0:
            roots.append(b)
        elif fa * fb < 0:
            roots.append(brentq(f, a, b, xtol=xtol, rtol=4 * np.finfo(float).eps, maxiter=500))
        else:
            roots.append(b)  # f touches zero from below without crossing
    return roots


def continuity_check(values) -> bool:
    """No jump may exceed 10x the local jump scale on either side of it.

    The scale on one side is the smaller of the two adjacent jumps there, so
    an isolated spike (two large jumps in a row) cannot vouch for itself,
    while a kink, which only changes the slope, is backed by its steep side.
    Cells within two steps of either end are not tested.
    """
    d = np.abs(np.diff(np.asarray(values, dtype=float)))
    if d.size < 5:
        return True
    left = np.minimum(d[:-4], d[1:-3])
    right = np.minimum(d[3:-1], d[4:])
    floor = 1e-12 + 1e-9 * float(np.max(d))
    return bool(np.all(d[2:-2] <= CONTINUITY_FACTOR * np.maximum(np.maximum(left, right), floor)))


def informativeness_thresholds(config: GameConfig, n_grid: int = SCAN_POINTS) -> ThresholdPair:
    """Qualities q_L < prior mean < q_H outside of which a debate is informative.

    ``h = debate_error - no_debate_error`` is scanned on ``(0, mean)`` and on
    ``(mean, 10 * prior upper bound)``; every sign change is refined by
    bracketing. q_L ends the negative run starting at 0, q_H starts the
    negative run reaching the probe bound. A branch without such a run is
    reported empty.
    """
    curves = _ErrorCurves(config)
    mean = config.prior.mean
    bound = PROBE_FACTOR * config.prior.upper
    xtol = config.numerics.root_abs_tol

    def f(q):
        return float(curves.h(q))

    lo_grid = np.linspace(0.0, mean, n_grid)
    hi_grid = np.linspace(mean, bound, n_grid)
    h_lo, h_hi = curves.h(lo_grid), curves.h(hi_grid)
    lo_roots = _roots(f, lo_grid, h_lo, xtol)
    hi_roots = _roots(f, hi_grid, h_hi, xtol)

    q_L = lo_roots[0] if h_lo[0] < 0 and lo_roots else None
    q_H = hi_roots[-1] if h_hi[-1] < 0 and hi_roots else None
    points = tuple(sorted(set(lo_roots) | set(hi_roots)))
    continuous = continuity_check(h_lo) and continuity_check(h_hi)
    return ThresholdPair(q_L, q_H, points, q_L is None, q_H is None, bound, continuous)
