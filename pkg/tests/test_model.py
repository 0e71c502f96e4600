import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from debategame.errors import ConfigError, CSFEvaluationError
from debategame.model import (
    ContestSuccess,
    ContinuousPrior,
    DiscretePrior,
    GameConfig,
    NumericSettings,
    OffPathBeliefPolicy,
    ShockDistribution,
    expect_over_prior,
    validate_csf,
)

import oracles


# --------------------------------------------------------------------------- shocks


@pytest.mark.parametrize("family,params,ref", [
    ("normal", {"mu": 0.0, "sigma": 1.0}, lambda x: oracles.normal_cdf(x)),
    ("normal", {"mu": 0.3, "sigma": 2.0}, lambda x: oracles.normal_cdf(x, 0.3, 2.0)),
    ("logistic", {"mu": 0.0, "s": 1.0}, lambda x: oracles.logistic_cdf(x)),
    ("uniform", {"a": -2.0, "b": 2.0}, lambda x: oracles.uniform_cdf(x, -2.0, 2.0)),
    ("gumbel", {"mu": 0.0, "beta": 1.0}, lambda x: oracles.gumbel_cdf(x)),
    ("negexp", {}, oracles.negexp_cdf),
])
def test_shock_cdf_matches_closed_form(family, params, ref):
    G = ShockDistribution(family, params)
    for x in (-3.0, -1.0, -0.25, 0.0, 0.4, 1.7):
        assert G.cdf(x) == pytest.approx(ref(x), abs=1e-14)


def test_shock_cdf_vectorized_and_scalar():
    G = ShockDistribution("normal", {"mu": 0.0, "sigma": 1.0})
    assert isinstance(G.cdf(0.0), float)
    out = G.cdf(np.array([-1.0, 0.0, 1.0]))
    assert out.shape == (3,)
    assert np.all(np.diff(out) > 0)


def test_negexp_shift():
    G = ShockDistribution("negexp", {"shift": 1.0})
    assert G.cdf(0.0) == pytest.approx(math.exp(-1.0))
    assert G.cdf(2.0) == 1.0


@pytest.mark.parametrize("family,params,path", [
    ("cauchy", {}, "family"),
    ("normal", {"mu": 0.0}, "params.sigma"),
    ("normal", {"mu": 0.0, "sigma": -1.0}, "params.sigma"),
    ("uniform", {"a": 1.0, "b": 1.0}, "params"),
    ("logistic", {"mu": 0.0, "s": 1.0, "k": 2.0}, "params.k"),
    ("gumbel", {"mu": float("nan"), "beta": 1.0}, "params.mu"),
])
def test_shock_rejects_bad_params(family, params, path):
    with pytest.raises(ConfigError) as err:
        ShockDistribution(family, params)
    assert err.value.path == path


def test_shock_sampling_matches_cdf():
    rng = np.random.default_rng(3)
    for family, params in [("gumbel", {"mu": 0.0, "beta": 1.0}), ("negexp", {})]:
        G = ShockDistribution(family, params)
        x = G.sample(rng, 200_000)
        for t in (-1.0, -0.2, 0.5):
            assert np.mean(x <= t) == pytest.approx(G.cdf(t), abs=5e-3)


# --------------------------------------------------------------------------- contest success


def test_tullock_values():
    csf = ContestSuccess("tullock")
    assert csf.theta(2.0, 1.0) == pytest.approx(2 / 3)
    assert csf.theta(4.0, 1.0) == pytest.approx(0.8)
    assert csf.theta(0.0, 1.0) == 0.0


def test_power_tullock_reduces_to_tullock():
    a = ContestSuccess("power-tullock", {"r": 1.0})
    b = ContestSuccess("tullock")
    q = np.linspace(0, 5, 11)
    np.testing.assert_allclose(a.theta(q, 0.7), b.theta(q, 0.7), rtol=1e-15)


@pytest.mark.parametrize("csf", [
    ContestSuccess("tullock"),
    ContestSuccess("power-tullock", {"r": 0.5}),
    ContestSuccess("power-tullock", {"r": 0.8}),
    ContestSuccess("custom-grid", {"ratio": [0, 1, 2, 4], "theta": [0, 0.5, 0.7, 0.85]}),
])
@pytest.mark.parametrize("q_I", [0.1, 0.5, 1.0])
def test_shipped_csfs_validate(csf, q_I):
    report = validate_csf(csf, q_I)
    assert report.passed, report.to_dict()


def test_nonconcave_custom_grid_fails_with_witness():
    csf = ContestSuccess("custom-grid", {"ratio": [0, 1, 2, 3], "theta": [0, 0.2, 0.7, 0.8]})
    report = validate_csf(csf, 1.0)
    assert not report.passed
    assert report.failures() == ["concave_in_q_C"]
    assert report.witnesses["concave_in_q_C"] == pytest.approx(1.0, abs=1e-3)


def test_power_above_one_rejected():
    with pytest.raises(ConfigError):
        ContestSuccess("power-tullock", {"r": 1.5})


def test_custom_grid_tail_tends_to_one():
    csf = ContestSuccess("custom-grid", {"ratio": [0, 1, 2], "theta": [0, 0.5, 0.6]})
    assert csf.theta(2.0, 1.0) == pytest.approx(0.6)
    assert 0.99 < csf.theta(1e4, 1.0) < 1.0
    # slope continuity at the last node
    h = 1e-7
    left = (csf.theta(2.0, 1.0) - csf.theta(2.0 - h, 1.0)) / h
    right = (csf.theta(2.0 + h, 1.0) - csf.theta(2.0, 1.0)) / h
    assert left == pytest.approx(right, rel=1e-4)


def test_nonfinite_theta_is_reported():
    class Broken(ContestSuccess):
        def theta(self, q_C, q_I):
            out = super().theta(q_C, q_I)
            return np.where(np.asarray(q_C) > 10.0, np.nan, out)

    with pytest.raises(CSFEvaluationError) as err:
        validate_csf(Broken("tullock"), 1.0)
    assert err.value.point[0] > 10.0


def test_saturating_csf_fails_limit():
    class Capped(ContestSuccess):
        def theta(self, q_C, q_I):
            return 0.9 * super().theta(q_C, q_I)

    report = validate_csf(Capped("tullock"), 1.0)
    assert report.failures() == ["limit_one"]


# --------------------------------------------------------------------------- priors


def test_discrete_prior_normalizes_and_merges():
    p = DiscretePrior([2.0, 0.0, 2.0], [0.25, 0.5, 0.25])
    assert p.points.tolist() == [0.0, 2.0]
    assert p.masses.tolist() == [0.5, 0.5]
    assert p.mean == 1.0
    with pytest.raises(ValueError):
        p.points[0] = 3.0


@pytest.mark.parametrize("points,masses", [([-1.0, 1.0], [0.5, 0.5]), ([1.0], [0.0]), ([0.0], [1.0]), ([], [])])
def test_discrete_prior_rejects(points, masses):
    with pytest.raises(ConfigError):
        DiscretePrior(points, masses)


def test_discrete_prior_cdf_ppf_density():
    p = DiscretePrior([0.0, 1.0, 3.0], [0.2, 0.5, 0.3])
    assert p.cdf(0.5) == pytest.approx(0.2)
    assert p.cdf(3.0) == pytest.approx(1.0)
    assert p.ppf(0.1) == 0.0 and p.ppf(0.6) == 1.0 and p.ppf(0.95) == 3.0
    assert p.density(1.0) == 0.5 and p.density(2.0) == 0.0


def test_discrete_truncation():
    p = DiscretePrior([0.0, 1.0, 3.0], [0.2, 0.5, 0.3])
    assert p.truncated(lower=1.0).mean == pytest.approx((0.5 + 0.9) / 0.8)
    assert p.truncated(upper=0.5).mean == 0.0
    with pytest.raises(ConfigError):
        p.truncated(lower=5.0)


@pytest.mark.parametrize("family,params,mean", [
    ("gamma", {"shape": 2.0, "scale": 0.5}, 1.0),
    ("gamma", {"shape": 0.7, "scale": 1.3}, 0.91),
    ("lognormal", {"mu": 0.0, "sigma": 0.5}, math.exp(0.125)),
    ("lognormal", {"mu": -0.3, "sigma": 0.3}, math.exp(-0.3 + 0.045)),
])
def test_continuous_means_match_closed_form(family, params, mean):
    prior = ContinuousPrior(family, params)
    assert expect_over_prior(lambda q: q, prior) == pytest.approx(mean, abs=1e-8)


def test_truncated_exponential_mean():
    rate, upper = 1.5, 2.0
    prior = ContinuousPrior("truncated-exponential", {"rate": rate, "upper": upper})
    exact = 1 / rate - upper * math.exp(-rate * upper) / (1 - math.exp(-rate * upper))
    assert prior.mean == pytest.approx(exact, abs=1e-12)
    assert prior.upper == upper


def test_grid_density_is_normalized():
    prior = ContinuousPrior("grid-density", {"grid": [0.0, 1.0, 2.0], "density": [0.0, 1.0, 0.0]})
    assert prior.expect(lambda q: 1.0) == pytest.approx(1.0, abs=1e-12)
    assert prior.mean == pytest.approx(1.0, abs=1e-12)
    assert prior.ppf(prior.cdf(0.7)) == pytest.approx(0.7, abs=1e-12)


def test_discretize_preserves_mean():
    prior = ContinuousPrior("gamma", {"shape": 2.0, "scale": 0.5})
    disc = prior.discretize(256)
    assert disc.points.size == 256
    assert disc.mean == pytest.approx(prior.mean, abs=1e-12)
    grid = ContinuousPrior("grid-density", {"grid": [0.0, 1.0, 3.0], "density": [1.0, 2.0, 0.5]})
    assert grid.discretize(64).mean == pytest.approx(grid.mean, abs=1e-10)


def test_continuous_prior_lower_bound():
    prior = ContinuousPrior("gamma", {"shape": 2.0, "scale": 0.5}, lower=0.5)
    assert prior.lower == 0.5
    assert prior.cdf(0.5) == 0.0
    assert prior.mean > 1.0


@given(st.lists(st.tuples(st.floats(0, 5), st.floats(0.01, 1)), min_size=1, max_size=6))
def test_discrete_expectation_is_weighted_sum(pairs):
    points = [p for p, _ in pairs]
    masses = [m for _, m in pairs]
    if sum(p * m for p, m in pairs) <= 0:
        return
    prior = DiscretePrior(points, masses)
    total = sum(masses)
    expected = sum(p * p * m for p, m in pairs) / total
    assert prior.expect(lambda q: q * q) == pytest.approx(expected, rel=1e-12, abs=1e-12)


# --------------------------------------------------------------------------- settings and config


@pytest.mark.parametrize("kwargs", [{"tie_tol": 0.0}, {"quad_rel_tol": -1.0}, {"truncation_quantile": 1.0},
                                    {"csf_probe_grid_size": 4}])
def test_numeric_settings_validation(kwargs):
    with pytest.raises(ConfigError):
        NumericSettings(**kwargs)


def test_game_config_quality_bounds():
    prior = DiscretePrior([0.0, 2.0], [0.5, 0.5])
    shock = ShockDistribution("normal", {"mu": 0.0, "sigma": 1.0})
    csf = ContestSuccess("tullock")
    assert GameConfig(1.0, prior, shock, csf).q_I == 1.0
    for bad in (0.0, 1.0000001, -0.5, float("nan")):
        with pytest.raises(ConfigError) as err:
            GameConfig(bad, prior, shock, csf)
        assert err.value.path == "q_I"


def test_off_path_policy_validation():
    assert OffPathBeliefPolicy().to_dict() == {"rule": "point-mass-at", "value": 0.0}
    assert OffPathBeliefPolicy("full-prior", 3.0).value is None
    with pytest.raises(ConfigError):
        OffPathBeliefPolicy("uniform", 0.0)
    with pytest.raises(ConfigError):
        OffPathBeliefPolicy("right-truncate-at", -1.0)


def test_config_check_raises_on_bad_csf(f1_uniform):
    bad = GameConfig(1.0, f1_uniform.prior, f1_uniform.shock,
                     ContestSuccess("custom-grid", {"ratio": [0, 1, 2, 3], "theta": [0, 0.2, 0.7, 0.8]}))
    with pytest.raises(ConfigError) as err:
        bad.check()
    assert err.value.path == "csf"
