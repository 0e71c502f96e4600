"""Bayesian model of a pre-election debate between an incumbent and a privately informed challenger."""

from .config_io import config_from_dict, config_to_dict, load_config
from .equilibrium import (
    classify_equilibrium,
    incumbent_best_reply,
    sequence_invariance_check,
    sequential_equilibria,
    threshold_consistency_scan,
)
from .errors import (
    ConfigError,
    DebateGameError,
    DegeneratePriorError,
    DomainError,
    InvariantError,
    NumericError,
    ResolutionError,
)
from .informativeness import classify_debate, informativeness_thresholds
from .model import (
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
from .montecarlo import SimulationSpec, oracle_check, simulate_election
from .payoffs import (
    BeliefState,
    challenger_debate_payoff,
    debate_payoff_curve,
    incumbent_debate_payoff,
    no_debate_payoff,
    payoff_matrix,
)
from .posterior import check_posterior_signal, crossing_quality, posterior_means, win_mass

__version__ = "0.1.0"
