"""Model checking for Markov reward models with credal transition rows.

The package computes exact lower and upper bounds of bounded-horizon
hitting probabilities, expected cumulative rewards and bounded-reward
probabilities over labelled Markov (reward) models whose transition rows
may be probability intervals or explicit vertex sets, and checks
PCTL/PRCTL-style threshold formulas (with lower/upper operator variants)
against them.
"""

from .credal import (
    PMF,
    CredalSet,
    StateSpace,
    linear_vacuous,
    make_pmf,
    vertices_from_intervals,
)
from .inference import (
    BoundedRewardTable,
    Mode,
    TransitionModel,
    apply_dual,
    apply_primal,
    bounded_reward_probabilities,
    conditional_hitting,
    expected_cumulative_reward,
    hitting_probabilities,
    make_absorbing,
    next_step_probability,
)
from .logic import (
    check,
    evaluate_path,
    evaluate_reward,
    format_formula,
    parse_formula,
    sat_set,
)
from .modelio import (
    bundled_model_names,
    bundled_model_path,
    load_document,
    load_model,
    model_from_document,
    save_document,
)

__version__ = "0.1.0"

__all__ = [
    "PMF",
    "CredalSet",
    "StateSpace",
    "linear_vacuous",
    "make_pmf",
    "vertices_from_intervals",
    "BoundedRewardTable",
    "Mode",
    "TransitionModel",
    "apply_dual",
    "apply_primal",
    "bounded_reward_probabilities",
    "conditional_hitting",
    "expected_cumulative_reward",
    "hitting_probabilities",
    "make_absorbing",
    "next_step_probability",
    "check",
    "evaluate_path",
    "evaluate_reward",
    "format_formula",
    "parse_formula",
    "sat_set",
    "bundled_model_names",
    "bundled_model_path",
    "load_document",
    "load_model",
    "model_from_document",
    "save_document",
    "__version__",
]
