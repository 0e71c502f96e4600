"""Game primitives: incumbent quality, challenger prior, nature shock and the
contest success function, plus the shared expectation kernel.

Every object here is immutable after construction. Distribution parameters are
stored as read-only mappings / arrays so instances can be shared across threads.
"""

from __future__ import annotations

import math
from abc import ABC, abstractmethod
from dataclasses import dataclass, field
from functools import cached_property
from types import MappingProxyType
from typing import Callable, Mapping, Sequence

import numpy as np
from scipy import integrate, stats
from scipy.special import expit, ndtr

from .errors import ConfigError, CSFEvaluationError, QuadratureError

# Prior-independent probe bound for the contest success function checks.
Q_MAX = 1e6
# Central-difference step is FD_REL_STEP * (1 + |x|).
FD_REL_STEP = 1e-5
# Second differences above this count as convex curvature (theta lives in [0, 1]).
CURVATURE_TOL = 1e-13
LIMIT_TOL = 1e-6
QUAD_ABS_TOL = 1e-15
QUAD_LIMIT = 200


def _frozen_params(params: Mapping[str, object] | None) -> Mapping[str, object]:
    return MappingProxyType(dict(params or {}))


def _readonly(a) -> np.ndarray:
    arr = np.array(a, dtype=float)
    arr.setflags(write=False)
    return arr


def _as_output(x):
    arr = np.asarray(x, dtype=float)
    return float(arr) if arr.ndim == 0 else arr


@dataclass(frozen=True)
class NumericSettings:
    quad_rel_tol: float = 1e-10
    truncation_quantile: float = 1.0 - 1e-10
    root_abs_tol: float = 1e-12
    tie_tol: float = 1e-9
    csf_probe_grid_size: int = 2048

    def __post_init__(self):
        for name in ("quad_rel_tol", "root_abs_tol", "tie_tol"):
            value = getattr(self, name)
            if not (math.isfinite(value) and value > 0):
                raise ConfigError(f"must be a positive finite number, got {value!r}", name)
        if not 0.5 < self.truncation_quantile < 1.0:
            raise ConfigError("must lie in (0.5, 1)", "truncation_quantile")
        if int(self.csf_probe_grid_size) != self.csf_probe_grid_size or self.csf_probe_grid_size < 16:
            raise ConfigError("must be an integer >= 16", "csf_probe_grid_size")


# --------------------------------------------------------------------------- shock

SHOCK_FAMILIES = {
    "normal": ("mu", "sigma"),
    "logistic": ("mu", "s"),
    "uniform": ("a", "b"),
    "gumbel": ("mu", "beta"),
    "negexp": (),
}


@dataclass(frozen=True)
class ShockDistribution:
    """Distribution G of the Election-Day shock.

    ``negexp`` is the law of ``shift - Exponential(1)``; its CDF is
    ``min(exp(x - shift), 1)``. ``shift`` is optional and defaults to 0.
    """

    family: str
    params: Mapping[str, float] = field(default_factory=dict)

    def __post_init__(self):
        if self.family not in SHOCK_FAMILIES:
            raise ConfigError(f"unknown shock family {self.family!r}", "family")
        allowed = set(SHOCK_FAMILIES[self.family]) | ({"shift"} if self.family == "negexp" else set())
        params = {}
        for key, value in dict(self.params).items():
            if key not in allowed:
                raise ConfigError(f"unexpected parameter for {self.family}", f"params.{key}")
            params[key] = _finite(value, f"params.{key}")
        for key in SHOCK_FAMILIES[self.family]:
            if key not in params:
                raise ConfigError("missing parameter", f"params.{key}")
        if self.family == "negexp":
            params.setdefault("shift", 0.0)
        scale_key = {"normal": "sigma", "logistic": "s", "gumbel": "beta"}.get(self.family)
        if scale_key and params[scale_key] <= 0:
            raise ConfigError("scale must be positive", f"params.{scale_key}")
        if self.family == "uniform" and not params["a"] < params["b"]:
            raise ConfigError("need a < b", "params")
        object.__setattr__(self, "params", _frozen_params(params))
        self._check_cdf()

    def cdf(self, x):
        x = np.asarray(x, dtype=float)
        p = self.params
        if self.family == "normal":
            out = ndtr((x - p["mu"]) / p["sigma"])
        elif self.family == "logistic":
            out = expit((x - p["mu"]) / p["s"])
        elif self.family == "uniform":
            out = np.clip((x - p["a"]) / (p["b"] - p["a"]), 0.0, 1.0)
        elif self.family == "gumbel":
            out = np.exp(-np.exp(np.minimum(-(x - p["mu"]) / p["beta"], 700.0)))
        else:
            out = np.exp(np.minimum(x - p["shift"], 0.0))
        return _as_output(out)

    def sample(self, rng: np.random.Generator, size=None):
        p = self.params
        if self.family == "normal":
            return rng.normal(p["mu"], p["sigma"], size)
        if self.family == "logistic":
            return rng.logistic(p["mu"], p["s"], size)
        if self.family == "uniform":
            return rng.uniform(p["a"], p["b"], size)
        if self.family == "gumbel":
            return rng.gumbel(p["mu"], p["beta"], size)
        return p["shift"] - rng.exponential(1.0, size)

    def _check_cdf(self):
        grid = np.linspace(-50.0, 50.0, 4001)
        values = self.cdf(grid)
        if np.any(np.diff(values) < 0):
            raise ConfigError("cdf is not nondecreasing", "family")
        lo, hi = self.cdf(-1e6), self.cdf(1e6)
        if lo > 1e-6 or hi < 1 - 1e-6:
            raise ConfigError(f"cdf limits are {lo:.3g} and {hi:.3g}, not 0 and 1", "params")


def _finite(value, path) -> float:
    try:
        out = float(value)
    except (TypeError, ValueError):
        raise ConfigError(f"expected a number, got {value!r}", path) from None
    if not math.isfinite(out):
        raise ConfigError(f"expected a finite number, got {value!r}", path)
    return out


# --------------------------------------------------------------------------- CSF

CSF_FAMILIES = ("tullock", "power-tullock", "custom-grid")


@dataclass(frozen=True)
class ContestSuccess:
    """Probability theta(q_C, q_I) that the challenger wins the debate.

    ``custom-grid`` tabulates theta as a function of the ratio ``q_C / q_I``:
    ``params = {"ratio": [0, x1, ...], "theta": [0, t1, ...]}``. Between nodes
    it interpolates linearly; past the last node it continues with a tail
    ``1 - A / (x + c)`` matching value and slope, so theta -> 1.
    """

    family: str
    params: Mapping[str, object] = field(default_factory=dict)

    def __post_init__(self):
        if self.family not in CSF_FAMILIES:
            raise ConfigError(f"unknown csf family {self.family!r}", "family")
        params = dict(self.params)
        if self.family == "tullock":
            if params:
                raise ConfigError("tullock takes no parameters", "params")
        elif self.family == "power-tullock":
            extra = set(params) - {"r"}
            if extra:
                raise ConfigError("unexpected parameter", f"params.{sorted(extra)[0]}")
            r = _finite(params.get("r", None), "params.r")
            if not 0 < r <= 1:
                raise ConfigError("r must lie in (0, 1]", "params.r")
            params = {"r": r}
        else:
            params = self._custom_grid(params)
        object.__setattr__(self, "params", _frozen_params(params))

    @staticmethod
    def _custom_grid(params):
        if set(params) != {"ratio", "theta"}:
            raise ConfigError("custom-grid needs exactly 'ratio' and 'theta'", "params")
        try:
            ratio = np.asarray(params["ratio"], dtype=float)
            theta = np.asarray(params["theta"], dtype=float)
        except (TypeError, ValueError):
            raise ConfigError("ratio/theta must be numeric lists", "params") from None
        if ratio.ndim != 1 or ratio.shape != theta.shape or ratio.size < 2:
            raise ConfigError("ratio and theta must be equal-length lists (>= 2 nodes)", "params")
        if not (np.all(np.isfinite(ratio)) and np.all(np.isfinite(theta))):
            raise ConfigError("non-finite node", "params")
        if ratio[0] != 0 or theta[0] != 0:
            raise ConfigError("first node must be (0, 0)", "params.ratio[0]")
        if np.any(np.diff(ratio) <= 0):
            raise ConfigError("ratio must be strictly increasing", "params.ratio")
        if np.any(theta < 0) or np.any(theta >= 1):
            raise ConfigError("theta values must lie in [0, 1)", "params.theta")
        if theta[-1] <= theta[-2]:
            raise ConfigError("last segment must be increasing", "params.theta")
        return {"ratio": _readonly(ratio), "theta": _readonly(theta)}

    def theta(self, q_C, q_I):
        q_C = np.asarray(q_C, dtype=float)
        q_I = np.asarray(q_I, dtype=float)
        if self.family == "tullock":
            out = q_C / (q_C + q_I)
        elif self.family == "power-tullock":
            r = self.params["r"]
            a, b = q_C**r, q_I**r
            out = a / (a + b)
        else:
            out = self._custom_theta(q_C / q_I)
        return _as_output(out)

    def _custom_theta(self, x):
        ratio, theta = self.params["ratio"], self.params["theta"]
        slope = (theta[-1] - theta[-2]) / (ratio[-1] - ratio[-2])
        shift = (1.0 - theta[-1]) / slope  # x_N + c
        amp = (1.0 - theta[-1]) * shift
        inner = np.interp(np.minimum(x, ratio[-1]), ratio, theta)
        tail = 1.0 - amp / (np.maximum(x, ratio[-1]) - ratio[-1] + shift)
        return np.where(x <= ratio[-1], inner, tail)

    def kinks(self, q_I: float) -> np.ndarray:
        """q_C locations where theta is not smooth (interior grid nodes)."""
        if self.family != "custom-grid":
            return np.empty(0)
        return np.asarray(self.params["ratio"][1:]) * q_I


@dataclass(frozen=True)
class ValidationReport:
    conditions: Mapping[str, bool]
    witnesses: Mapping[str, object]
    q_I: float

    @property
    def passed(self) -> bool:
        return all(self.conditions.values())

    def failures(self) -> list[str]:
        return [name for name, ok in self.conditions.items() if not ok]

    def to_dict(self) -> dict:
        return {
            "q_I": self.q_I,
            "passed": self.passed,
            "conditions": dict(self.conditions),
            "witnesses": {k: v for k, v in self.witnesses.items()},
        }


def validate_csf(csf: ContestSuccess, q_I: float, settings: NumericSettings | None = None) -> ValidationReport:
    """Check the five structural conditions on theta at incumbent quality ``q_I``.

    Derivatives are central finite differences on a log-spaced probe grid over
    ``[1e-4, Q_MAX]`` (plus any custom-grid kinks). Concavity is certified up
    to ``CURVATURE_TOL``. The limit condition extrapolates ``1 - theta`` from
    ``Q_MAX / 100``, ``Q_MAX / 10`` and ``Q_MAX`` and needs the limit (or the
    value at ``Q_MAX``) to be below ``LIMIT_TOL``.
    """
    settings = settings or NumericSettings()
    q = np.geomspace(1e-4, Q_MAX, settings.csf_probe_grid_size)
    kinks = csf.kinks(q_I)
    q = np.unique(np.concatenate([q, kinks[(kinks > 1e-4) & (kinks < Q_MAX)]]))
    h = FD_REL_STEP * (1.0 + q)
    h_I = FD_REL_STEP * (1.0 + q_I)

    def evaluate(qc, qi):
        values = np.asarray(csf.theta(qc, qi), dtype=float)
        bad = ~np.isfinite(values)
        if np.any(bad):
            i = int(np.argmax(bad))
            raise CSFEvaluationError(float(np.broadcast_to(qc, values.shape)[i]),
                                     float(np.broadcast_to(qi, values.shape)[i]), float(values[i]))
        return values

    t0 = evaluate(q, q_I)
    t_plus, t_minus = evaluate(q + h, q_I), evaluate(q - h, q_I)
    i_plus, i_minus = evaluate(q, q_I + h_I), evaluate(q, q_I - h_I)
    at_origin = float(evaluate(0.0, q_I))

    conditions, witnesses = {}, {}

    def record(name, ok_mask):
        ok = bool(np.all(ok_mask))
        conditions[name] = ok
        witnesses[name] = None if ok else float(q[int(np.argmin(ok_mask))])

    record("decreasing_in_q_I", i_plus - i_minus < 0)
    record("increasing_in_q_C", t_plus - t_minus > 0)
    record("concave_in_q_C", t_plus - 2 * t0 + t_minus <= CURVATURE_TOL)
    conditions["zero_at_origin"] = at_origin == 0.0
    witnesses["zero_at_origin"] = None if at_origin == 0.0 else 0.0

    f1, f2, f3 = (1.0 - float(evaluate(Q_MAX / k, q_I)) for k in (100.0, 10.0, 1.0))
    if f3 <= LIMIT_TOL:
        limit_ok = True
    elif not f1 > f2 > f3 > 0:
        limit_ok = False
    else:
        # Aitken extrapolation of 1 - theta along the geometric probe points.
        d1, d2 = f1 - f2, f2 - f3
        limit_ok = d2 < d1 and f3 - d2 * d2 / (d1 - d2) <= LIMIT_TOL
    conditions["limit_one"] = limit_ok
    witnesses["limit_one"] = None if limit_ok else Q_MAX
    return ValidationReport(MappingProxyType(conditions), MappingProxyType(witnesses), float(q_I))


# --------------------------------------------------------------------------- priors


def _quad(f, a, b, settings: NumericSettings, points=None) -> float:
    if b <= a:
        return 0.0
    out = integrate.quad(f, a, b, epsabs=QUAD_ABS_TOL, epsrel=settings.quad_rel_tol,
                         limit=QUAD_LIMIT, points=points, full_output=1)
    value, abserr, info = out[0], out[1], out[2]
    if not math.isfinite(value):
        raise QuadratureError(f"non-finite integral on [{a}, {b}]")
    if len(out) > 3:
        budget = 100 * settings.quad_rel_tol * abs(value) + 10 * QUAD_ABS_TOL
        if abserr > budget:
            achieved = abserr / abs(value) if value else abserr
            raise QuadratureError(
                f"quadrature on [{a}, {b}] stopped at relative error {achieved:.3g} "
                f"after {info['last']} subdivisions: {out[3]}", achieved)
    return value


class ChallengerPrior(ABC):
    """Distribution p of challenger quality on [0, inf)."""

    is_discrete: bool

    @property
    @abstractmethod
    def lower(self) -> float: ...

    @property
    @abstractmethod
    def upper(self) -> float:
        """Largest quality carrying mass (truncation bound for unbounded families)."""

    @abstractmethod
    def expect(self, f: Callable, settings: NumericSettings | None = None) -> float: ...

    @abstractmethod
    def density(self, q):
        """pdf for continuous priors, point mass for discrete ones."""

    @abstractmethod
    def cdf(self, q): ...

    @abstractmethod
    def ppf(self, u): ...

    @abstractmethod
    def sample(self, rng: np.random.Generator, size: int) -> np.ndarray: ...

    @abstractmethod
    def truncated(self, lower: float | None = None, upper: float | None = None) -> "ChallengerPrior":
        """Restriction to ``lower <= q <= upper``, renormalized."""

    @abstractmethod
    def discretize(self, n: int, settings: NumericSettings | None = None) -> "DiscretePrior": ...

    @abstractmethod
    def to_dict(self) -> dict: ...

    @cached_property
    def mean(self) -> float:
        return self.expect(lambda q: q)


class DiscretePrior(ChallengerPrior):
    is_discrete = True

    def __init__(self, points: Sequence[float], masses: Sequence[float], require_positive_mean: bool = True):
        pts = np.asarray(points, dtype=float)
        w = np.asarray(masses, dtype=float)
        if pts.ndim != 1 or pts.shape != w.shape or pts.size == 0:
            raise ConfigError("need equal-length, non-empty points and masses", "points")
        if not (np.all(np.isfinite(pts)) and np.all(np.isfinite(w))):
            raise ConfigError("non-finite support point or mass", "points")
        if np.any(pts < 0):
            raise ConfigError(f"support point {pts[pts < 0][0]!r} is negative", "points")
        if np.any(w <= 0):
            raise ConfigError("masses must be positive", "points")
        order = np.argsort(pts, kind="stable")
        pts, w = pts[order], w[order]
        uniq, inverse = np.unique(pts, return_inverse=True)
        merged = np.zeros(uniq.size)
        np.add.at(merged, inverse, w)
        self.points = _readonly(uniq)
        total = merged.sum()
        # Leave already-normalized masses untouched so config echoes round-trip exactly.
        self.masses = _readonly(merged if abs(total - 1.0) <= 8 * np.finfo(float).eps else merged / total)
        mean = float(np.dot(self.points, self.masses))
        if not math.isfinite(mean) or (require_positive_mean and not mean > 0):
            raise ConfigError(f"prior mean must be positive, got {mean!r}", "points")

    def __repr__(self):
        return f"DiscretePrior(points={self.points.tolist()}, masses={self.masses.tolist()})"

    def __eq__(self, other):
        return (isinstance(other, DiscretePrior) and np.array_equal(self.points, other.points)
                and np.array_equal(self.masses, other.masses))

    __hash__ = None

    @property
    def lower(self):
        return float(self.points[0])

    @property
    def upper(self):
        return float(self.points[-1])

    def expect(self, f, settings=None):
        values = np.asarray(f(self.points), dtype=float)
        if values.shape != self.points.shape:
            values = np.array([float(f(q)) for q in self.points])
        if not np.all(np.isfinite(values)):
            raise QuadratureError("integrand not finite on the support")
        return float(np.dot(self.masses, values))

    def density(self, q):
        q = np.asarray(q, dtype=float)
        idx = np.clip(np.searchsorted(self.points, q), 0, self.points.size - 1)
        out = np.where(self.points[idx] == q, self.masses[idx], 0.0)
        return _as_output(out)

    def cdf(self, q):
        cum = np.concatenate([[0.0], np.cumsum(self.masses)])
        return _as_output(np.minimum(cum[np.searchsorted(self.points, q, side="right")], 1.0))

    def ppf(self, u):
        cum = np.cumsum(self.masses)
        idx = np.minimum(np.searchsorted(cum, np.asarray(u, dtype=float), side="left"), self.points.size - 1)
        return _as_output(self.points[idx])

    def sample(self, rng, size):
        return self.points[rng.choice(self.points.size, size=size, p=self.masses)]

    def truncated(self, lower=None, upper=None):
        keep = np.ones(self.points.size, dtype=bool)
        if lower is not None:
            keep &= self.points >= lower
        if upper is not None:
            keep &= self.points <= upper
        if not keep.any():
            raise ConfigError(f"truncation to [{lower}, {upper}] leaves no mass")
        return DiscretePrior(self.points[keep], self.masses[keep], require_positive_mean=False)

    def discretize(self, n, settings=None):
        return self

    def to_dict(self):
        return {"family": "discrete", "points": [[float(q), float(m)] for q, m in zip(self.points, self.masses)]}


class _PiecewiseLinearDensity:
    """Unnormalized-input density, linear between grid nodes, zero outside."""

    def __init__(self, grid, values):
        self.grid = np.asarray(grid, dtype=float)
        vals = np.asarray(values, dtype=float)
        seg = 0.5 * (vals[1:] + vals[:-1]) * np.diff(self.grid)
        total = seg.sum()
        self.values = vals / total
        self.cum = np.concatenate([[0.0], np.cumsum(seg / total)])

    def pdf(self, q):
        return np.interp(q, self.grid, self.values, left=0.0, right=0.0)

    def cdf(self, q):
        q = np.clip(np.asarray(q, dtype=float), self.grid[0], self.grid[-1])
        k = np.clip(np.searchsorted(self.grid, q, side="right") - 1, 0, self.grid.size - 2)
        t = q - self.grid[k]
        slope = (self.values[k + 1] - self.values[k]) / (self.grid[k + 1] - self.grid[k])
        return np.minimum(self.cum[k] + self.values[k] * t + 0.5 * slope * t * t, 1.0)

    def ppf(self, u):
        u = np.clip(np.asarray(u, dtype=float), 0.0, 1.0)
        k = np.clip(np.searchsorted(self.cum, u, side="right") - 1, 0, self.grid.size - 2)
        width = self.grid[k + 1] - self.grid[k]
        f0, f1 = self.values[k], self.values[k + 1]
        slope = (f1 - f0) / width
        rem = u - self.cum[k]
        # Solve f0 t + slope t^2 / 2 = rem on [0, width].
        disc = np.sqrt(np.maximum(f0 * f0 + 2 * slope * rem, 0.0))
        with np.errstate(divide="ignore", invalid="ignore"):
            t = np.where(np.abs(slope) > 1e-300, 2 * rem / (f0 + disc), rem / np.where(f0 > 0, f0, np.inf))
        t = np.where(np.isfinite(t), t, 0.0)
        return self.grid[k] + np.clip(t, 0.0, width)


CONTINUOUS_FAMILIES = ("gamma", "lognormal", "truncated-exponential", "grid-density")
_TAIL_QUANTILES = (0.5, 0.9, 0.99, 0.999, 0.9999, 0.99999, 0.999999, 0.9999999, 0.99999999, 0.999999999)


class ContinuousPrior(ChallengerPrior):
    """Continuous prior, restricted to ``[lower, upper]`` and renormalized.

    Unbounded families are cut at ``truncation_quantile`` unless an explicit
    ``upper`` is given. The cut drops the tail's share of the mean; for heavy
    tails (lognormal with sigma around 1 or more) that is already ~1e-8.
    """

    is_discrete = False

    def __init__(self, family: str, params: Mapping[str, object], lower: float = 0.0,
                 upper: float | None = None, truncation_quantile: float = 1.0 - 1e-10):
        if family not in CONTINUOUS_FAMILIES:
            raise ConfigError(f"unknown prior family {family!r}", "family")
        self.family = family
        self.truncation_quantile = float(truncation_quantile)
        base, natural_lo, natural_hi, clean = self._build(family, dict(params))
        self.params = _frozen_params(clean)
        self._base = base
        lo = max(float(lower), natural_lo)
        if upper is None:
            hi = natural_hi if natural_hi is not None else float(base.ppf(self.truncation_quantile))
        else:
            hi = float(upper) if natural_hi is None else min(float(upper), natural_hi)
        if not hi > lo:
            raise ConfigError(f"empty support [{lo}, {hi}]")
        self._lower, self._upper = lo, hi
        self._cdf_lo = float(base.cdf(lo))
        self._mass = float(base.cdf(hi)) - self._cdf_lo
        if not self._mass > 0:
            raise ConfigError(f"restriction to [{lo}, {hi}] leaves no mass")
        mean = self.mean
        if not (mean > 0 and math.isfinite(mean)):
            raise ConfigError(f"prior mean must be positive, got {mean!r}")

    @staticmethod
    def _build(family, params):
        def need(*names):
            missing = [n for n in names if n not in params]
            extra = [n for n in params if n not in names]
            if missing:
                raise ConfigError("missing parameter", f"params.{missing[0]}")
            if extra:
                raise ConfigError("unexpected parameter", f"params.{extra[0]}")

        if family == "gamma":
            need("shape", "scale")
            shape, scale = _finite(params["shape"], "params.shape"), _finite(params["scale"], "params.scale")
            if shape <= 0 or scale <= 0:
                raise ConfigError("shape and scale must be positive", "params")
            return stats.gamma(a=shape, scale=scale), 0.0, None, {"shape": shape, "scale": scale}
        if family == "lognormal":
            need("mu", "sigma")
            mu, sigma = _finite(params["mu"], "params.mu"), _finite(params["sigma"], "params.sigma")
            if sigma <= 0:
                raise ConfigError("sigma must be positive", "params.sigma")
            return stats.lognorm(s=sigma, scale=math.exp(mu)), 0.0, None, {"mu": mu, "sigma": sigma}
        if family == "truncated-exponential":
            need("rate", "upper")
            rate, up = _finite(params["rate"], "params.rate"), _finite(params["upper"], "params.upper")
            if rate <= 0 or up <= 0:
                raise ConfigError("rate and upper must be positive", "params")
            return stats.expon(scale=1.0 / rate), 0.0, up, {"rate": rate, "upper": up}
        need("grid", "density")
        try:
            grid = np.asarray(params["grid"], dtype=float)
            dens = np.asarray(params["density"], dtype=float)
        except (TypeError, ValueError):
            raise ConfigError("grid/density must be numeric lists", "params") from None
        if grid.ndim != 1 or grid.shape != dens.shape or grid.size < 2:
            raise ConfigError("grid and density must be equal-length lists (>= 2 nodes)", "params")
        if not (np.all(np.isfinite(grid)) and np.all(np.isfinite(dens))):
            raise ConfigError("non-finite node", "params")
        if grid[0] < 0 or np.any(np.diff(grid) <= 0):
            raise ConfigError("grid must be nonnegative and strictly increasing", "params.grid")
        if np.any(dens < 0) or not np.any(dens > 0):
            raise ConfigError("density must be nonnegative and not identically zero", "params.density")
        base = _PiecewiseLinearDensity(grid, dens)
        return base, float(grid[0]), float(grid[-1]), {"grid": _readonly(grid), "density": _readonly(dens)}

    def __repr__(self):
        return (f"ContinuousPrior({self.family!r}, {dict(self.params)!r}, "
                f"lower={self._lower!r}, upper={self._upper!r})")

    @property
    def lower(self):
        return self._lower

    @property
    def upper(self):
        return self._upper

    def _breakpoints(self) -> list[float]:
        pts = {self._lower, self._upper}
        for u in _TAIL_QUANTILES:
            pts.add(float(self.ppf(u)))
        if self.family == "grid-density":
            pts.update(float(g) for g in self.params["grid"])
        return sorted(p for p in pts if self._lower <= p <= self._upper)

    def expect(self, f, settings=None):
        settings = settings or NumericSettings()
        pdf = self._base.pdf
        mass = self._mass

        def integrand(q):
            return float(f(q)) * float(pdf(q)) / mass

        edges = self._breakpoints()
        return sum(_quad(integrand, a, b, settings) for a, b in zip(edges[:-1], edges[1:]))

    def density(self, q):
        q = np.asarray(q, dtype=float)
        inside = (q >= self._lower) & (q <= self._upper)
        return _as_output(np.where(inside, self._base.pdf(q), 0.0) / self._mass)

    def cdf(self, q):
        q = np.clip(np.asarray(q, dtype=float), self._lower, self._upper)
        return _as_output(np.clip((self._base.cdf(q) - self._cdf_lo) / self._mass, 0.0, 1.0))

    def ppf(self, u):
        u = np.clip(np.asarray(u, dtype=float), 0.0, 1.0)
        out = self._base.ppf(self._cdf_lo + u * self._mass)
        return _as_output(np.clip(out, self._lower, self._upper))

    def sample(self, rng, size):
        return np.asarray(self.ppf(rng.random(size)), dtype=float)

    def truncated(self, lower=None, upper=None):
        lo = self._lower if lower is None else max(self._lower, float(lower))
        hi = self._upper if upper is None else min(self._upper, float(upper))
        return ContinuousPrior(self.family, self.params, lower=lo, upper=hi,
                               truncation_quantile=self.truncation_quantile)

    def discretize(self, n=256, settings=None):
        """Mass-matched quantization: ``n`` equal-mass bins, each represented by
        its conditional mean, so the discretized mean equals the prior mean."""
        settings = settings or NumericSettings()
        edges = np.asarray(self.ppf(np.linspace(0.0, 1.0, n + 1)), dtype=float)
        edges[0], edges[-1] = self._lower, self._upper
        partial = self._partial_means(edges)
        if partial is None:
            pdf, mass = self._base.pdf, self._mass
            partial = np.array([_quad(lambda q: q * float(pdf(q)) / mass, a, b, settings) if b > a else 0.0
                                for a, b in zip(edges[:-1], edges[1:])])
        points = np.clip(n * partial, edges[:-1], edges[1:])
        return DiscretePrior(points, np.full(n, 1.0 / n))

    def _partial_means(self, edges):
        """Closed-form ``int_{e_k}^{e_k+1} q p(q) dq`` where the family allows it."""
        p = self.params
        if self.family in ("gamma", "truncated-exponential"):
            shape, scale = (p["shape"], p["scale"]) if self.family == "gamma" else (1.0, 1.0 / p["rate"])
            cum = shape * scale * stats.gamma.cdf(edges, a=shape + 1, scale=scale)
        elif self.family == "lognormal":
            mu, sigma = p["mu"], p["sigma"]
            with np.errstate(divide="ignore"):
                z = (np.log(edges) - mu - sigma**2) / sigma
            cum = math.exp(mu + 0.5 * sigma**2) * ndtr(z)
        else:
            return None
        return np.diff(cum) / self._mass

    def to_dict(self):
        params = {k: (v.tolist() if isinstance(v, np.ndarray) else v) for k, v in self.params.items()}
        out = {"family": self.family, "params": params}
        if self._lower > 0 and self.family != "grid-density":
            out["lower"] = self._lower
        return out


def expect_over_prior(f: Callable, prior: ChallengerPrior, settings: NumericSettings | None = None) -> float:
    """E_p[f(q)]: exact sum for discrete priors, adaptive quadrature otherwise."""
    return prior.expect(f, settings)


def prior_mean(prior: ChallengerPrior) -> float:
    return prior.mean


# --------------------------------------------------------------------------- config

OFF_PATH_RULES = ("full-prior", "right-truncate-at", "point-mass-at")


@dataclass(frozen=True)
class OffPathBeliefPolicy:
    """Voter belief after the challenger refuses a debate the incumbent accepted."""

    rule: str = "point-mass-at"
    value: float | None = 0.0

    def __post_init__(self):
        if self.rule not in OFF_PATH_RULES:
            raise ConfigError(f"unknown off-path rule {self.rule!r}", "rule")
        if self.rule == "full-prior":
            object.__setattr__(self, "value", None)
        else:
            value = _finite(self.value, "value")
            if value < 0:
                raise ConfigError("quality must be nonnegative", "value")
            object.__setattr__(self, "value", value)

    def to_dict(self):
        return {"rule": self.rule} if self.value is None else {"rule": self.rule, "value": self.value}


@dataclass(frozen=True)
class GameConfig:
    q_I: float
    prior: ChallengerPrior
    shock: ShockDistribution
    csf: ContestSuccess
    numerics: NumericSettings = field(default_factory=NumericSettings)
    off_path: OffPathBeliefPolicy = field(default_factory=OffPathBeliefPolicy)

    def __post_init__(self):
        q_I = _finite(self.q_I, "q_I")
        if not 0 < q_I <= 1:
            raise ConfigError(f"incumbent quality must lie in (0, 1], got {q_I!r}", "q_I")
        object.__setattr__(self, "q_I", q_I)
        for name, kind in (("prior", ChallengerPrior), ("shock", ShockDistribution),
                           ("csf", ContestSuccess), ("numerics", NumericSettings),
                           ("off_path", OffPathBeliefPolicy)):
            if not isinstance(getattr(self, name), kind):
                raise ConfigError(f"expected {kind.__name__}", name)

    def theta(self, q_C):
        return self.csf.theta(q_C, self.q_I)

    def G(self, x):
        return self.shock.cdf(x)

    def validate_csf(self) -> ValidationReport:
        return validate_csf(self.csf, self.q_I, self.numerics)

    def check(self) -> "GameConfig":
        """Raise ConfigError unless theta satisfies the structural conditions at q_I."""
        report = self.validate_csf()
        if not report.passed:
            name = report.failures()[0]
            raise ConfigError(f"contest success function fails {name} (witness q_C={report.witnesses[name]})", "csf")
        return self

    def with_q_I(self, q_I: float) -> "GameConfig":
        return GameConfig(q_I, self.prior, self.shock, self.csf, self.numerics, self.off_path)

    def with_prior(self, prior: ChallengerPrior) -> "GameConfig":
        return GameConfig(self.q_I, prior, self.shock, self.csf, self.numerics, self.off_path)
