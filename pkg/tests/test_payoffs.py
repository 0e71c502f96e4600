import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from debategame.equilibrium import threshold_consistency_scan
from debategame.errors import ConfigError, DegeneratePriorError
from debategame.model import ContestSuccess, DiscretePrior, GameConfig, OffPathBeliefPolicy, ShockDistribution
from debategame.payoffs import (
    BeliefState,
    challenger_debate_payoff,
    debate_margin,
    debate_payoff_curve,
    incumbent_debate_payoff,
    no_debate_payoff,
    off_path_belief,
    payoff_matrix,
)
from debategame.posterior import check_posterior_signal, posterior_means

import oracles


def with_policy(config, rule, value=None):
    return GameConfig(config.q_I, config.prior, config.shock, config.csf, config.numerics,
                      OffPathBeliefPolicy(rule, value))


@pytest.mark.parametrize("q_C,expected", [(0.0, 0.375), (1.0, 0.5625), (2.0, 0.625), (4.0, 0.675)])
def test_f1_uniform_conditional_payoffs(f1_uniform, q_C, expected):
    # theta(q_C) * G(1) + (1 - theta(q_C)) * G(-0.5) with G uniform on [-2, 2]
    full = BeliefState.full(f1_uniform.prior)
    assert challenger_debate_payoff(q_C, full, f1_uniform) == pytest.approx(expected, abs=1e-15)


def test_f1_uniform_ex_ante_values(f1_uniform):
    assert incumbent_debate_payoff(f1_uniform) == pytest.approx(0.5, abs=1e-15)
    assert no_debate_payoff(BeliefState.full(f1_uniform.prior), f1_uniform) == 0.5
    assert abs(debate_margin(f1_uniform)) <= 1e-10


def test_f1_normal_against_normal_cdf_oracle(f1_normal):
    expected = oracles.debate_value(1 / 3, 2.0, 0.5, 1.0, oracles.normal_cdf)
    assert incumbent_debate_payoff(f1_normal) == pytest.approx(expected, abs=1e-14)
    assert debate_margin(f1_normal) == pytest.approx(expected - 0.5, abs=1e-14)


def test_nodebate_against_exponential_oracle(nodebate):
    expected = oracles.debate_value(1 / 7, 0.4, 1 / 6, 1.0, oracles.negexp_cdf)
    assert expected == pytest.approx(0.45091, abs=1e-5)
    assert incumbent_debate_payoff(nodebate) == pytest.approx(expected, abs=1e-14)
    assert no_debate_payoff(BeliefState.full(nodebate.prior), nodebate) == pytest.approx(np.exp(-0.8), abs=1e-15)


def test_payoffs_vectorize(f1_normal):
    full = BeliefState.full(f1_normal.prior)
    q = np.array([0.0, 0.5, 3.0])
    vec = challenger_debate_payoff(q, full, f1_normal)
    assert vec.shape == (3,)
    assert vec.tolist() == [challenger_debate_payoff(x, full, f1_normal) for x in q]


def test_belief_states(f1_uniform):
    prior = DiscretePrior([0.0, 1.0, 3.0], [0.2, 0.5, 0.3])
    assert BeliefState.left_truncated(prior, 1.0).mean == pytest.approx(1.4 / 0.8)
    assert BeliefState.right_truncated(prior, 1.0).mean == pytest.approx(0.5 / 0.7)
    assert BeliefState.point_mass(0.0).mean == 0.0
    assert off_path_belief(f1_uniform).describe() == "point-mass(0)"


def test_point_mass_belief_cannot_be_conditioned(f1_uniform):
    with pytest.raises(DegeneratePriorError):
        challenger_debate_payoff(1.0, BeliefState.point_mass(0.0), f1_uniform)
    # a positive point mass means the debate cannot move the belief
    assert challenger_debate_payoff(1.0, BeliefState.point_mass(1.5), f1_uniform) == pytest.approx(0.625)


def test_payoff_matrix_f1_uniform(f1_uniform):
    m = payoff_matrix(f1_uniform)
    assert m.cell("P", "P").challenger == pytest.approx(0.5)
    assert m.cell("P", "NP").challenger == pytest.approx(0.25)  # G(0 - 1)
    assert m.cell("P", "NP").incumbent == pytest.approx(0.75)
    assert m.cell("NP", "P").challenger == m.cell("NP", "NP").challenger == 0.5
    assert m.refusal_below_debate_ex_ante and m.refusal_below_all_types
    for cell in m.cells.values():
        assert cell.incumbent + cell.challenger == pytest.approx(1.0)
    rows = m.to_csv().strip().splitlines()
    assert rows[0].startswith("incumbent,challenger") and len(rows) == 5


def test_payoff_matrix_conditional_probe(f1_uniform):
    m = payoff_matrix(f1_uniform, q_C_probe=4.0)
    assert m.cell("P", "P").challenger == pytest.approx(0.675)
    assert not m.cell("P", "P").ex_ante


def test_off_path_mean_at_prior_mean_is_rejected(f1_uniform):
    with pytest.raises(ConfigError) as err:
        payoff_matrix(with_policy(f1_uniform, "point-mass-at", 1.0))
    assert err.value.path == "off_path"
    flagged = payoff_matrix(with_policy(f1_uniform, "full-prior"))
    assert not flagged.refusal_below_debate_ex_ante


@pytest.mark.parametrize("cut,all_types,witness", [(0.5, False, 0.0), (0.3, True, None)])
def test_ex_ante_refusal_condition_is_not_enough(cut, all_types, witness):
    # Debate regime; right-truncating at 0.5 leaves the off-path mean just below the prior mean
    prior = DiscretePrior([0.0, 0.5, 0.55], [0.5, 0.49, 0.01])
    config = GameConfig(0.9, prior, ShockDistribution("negexp", {}), ContestSuccess("tullock"),
                        off_path=OffPathBeliefPolicy("right-truncate-at", cut))
    assert debate_margin(config) > 0
    m = payoff_matrix(config)
    assert m.off_path_mean < prior.mean
    assert m.refusal_below_debate_ex_ante
    assert m.refusal_below_all_types is all_types
    always_P = [c for c in threshold_consistency_scan(config).checks if c.strategy.kind == "always-P"][0]
    assert always_P.consistent is all_types
    assert always_P.deviating_witness == witness


discrete_priors = st.lists(st.tuples(st.floats(0.0, 3.0), st.floats(0.05, 1.0)), min_size=2, max_size=5,
                           unique_by=lambda t: round(t[0], 3))
shocks = st.sampled_from([
    ShockDistribution("normal", {"mu": 0.0, "sigma": 1.0}),
    ShockDistribution("logistic", {"mu": 0.0, "s": 1.0}),
    ShockDistribution("gumbel", {"mu": 0.0, "beta": 1.0}),
])
csfs = st.sampled_from([ContestSuccess("tullock"), ContestSuccess("power-tullock", {"r": 0.5})])


def build(pairs, q_I, shock, csf):
    points = [p for p, _ in pairs]
    masses = np.array([m for _, m in pairs])
    if np.dot(points, masses) <= 1e-3:
        return None
    return GameConfig(q_I, DiscretePrior(points, masses / masses.sum()), shock, csf)


@settings(max_examples=80)
@given(discrete_priors, st.floats(0.1, 1.0), shocks, csfs)
def test_debate_payoff_monotone_and_bounded(pairs, q_I, shock, csf):
    config = build(pairs, q_I, shock, csf)
    if config is None:
        return
    s = posterior_means(config)
    full = BeliefState.full(config.prior)
    q = np.linspace(0.0, 10.0, 101)
    u = challenger_debate_payoff(q, full, config)
    lo = shock.cdf(s.mean_given_loss - q_I)
    hi = shock.cdf(s.mean_given_win - q_I)
    assert np.all(u >= lo - 1e-15) and np.all(u <= hi + 1e-15)
    if hi - lo > 1e-9:
        assert np.all(np.diff(u) > 0)
    # ex-ante aggregation of the conditional payoff reproduces the direct formula
    aggregated = config.prior.expect(debate_payoff_curve(full, config))
    assert aggregated == pytest.approx(incumbent_debate_payoff(config), abs=1e-12)


@settings(max_examples=80)
@given(discrete_priors, st.floats(0.1, 1.0), shocks, csfs)
def test_jensen_direction_property(pairs, q_I, shock, csf):
    config = build(pairs, q_I, shock, csf)
    if config is None:
        return
    report = check_posterior_signal(config)
    margin = debate_margin(config)
    if report.jensen_direction == "concave":
        assert margin < 0
    elif report.jensen_direction == "convex":
        assert margin > 0
