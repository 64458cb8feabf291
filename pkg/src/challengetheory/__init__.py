"""
challengetheory - Challenge index models for binary risky choice

Canonicalizes choice problems into default/bold form, computes the challenge
index, fits its parameters to observed bold-choice proportions and runs the
accompanying correlation, effect, subgroup and cross-validation analyses.
"""

__version__ = "0.1.0"

# Main classes
from .challengetheory import ChallengeTheory, reference_checks
from .model_problems import canonicalize_problem, mirror_problem, is_bold_choice
from .model_weighting import value, weight
from .model_challenge import challenge_index, challenge_indices, ci_outcome_factor, ci_probability_factor
from .stats import pearson_r, pearson_or_none, fisher_interval, correlation_report, two_proportion_test
from .fit import bold_proportions, fit_params, model_comparison
from .crossval import split_respondents, cross_validate
from .analysis import effects_report, classify_bold_players, subgroup_analysis
from .utils import load_problems, load_problem_rows, load_responses, write_problems, write_responses, render_report
from .datamodels import (
    Prospect, BinaryProblem, RespondentRecord, ChoiceDataset, ParamSet, SearchConfig,
    ProblemObservation, FitResult, CorrelationReport, CrossValReport, EffectItem, EffectRow,
    BoldPlayerSummary, SubgroupRow,
)
from .exceptions import ChallengeTheoryError, ParseError, InvalidInputError, NumericalError

# Sample data functions
from .samples import (
    SampleData,
    builtin_fixtures,
    fixture_params,
    get_problems_path,
    list_available_samples,
)

__all__ = [
    # Main classes
    "ChallengeTheory",
    "reference_checks",
    "canonicalize_problem",
    "mirror_problem",
    "is_bold_choice",
    "value",
    "weight",
    "challenge_index",
    "challenge_indices",
    "ci_outcome_factor",
    "ci_probability_factor",
    "pearson_r",
    "pearson_or_none",
    "fisher_interval",
    "correlation_report",
    "two_proportion_test",
    "bold_proportions",
    "fit_params",
    "model_comparison",
    "split_respondents",
    "cross_validate",
    "effects_report",
    "classify_bold_players",
    "subgroup_analysis",
    "load_problems",
    "load_problem_rows",
    "load_responses",
    "write_problems",
    "write_responses",
    "render_report",

    # Types and errors
    "Prospect",
    "BinaryProblem",
    "RespondentRecord",
    "ChoiceDataset",
    "ParamSet",
    "SearchConfig",
    "ProblemObservation",
    "FitResult",
    "CorrelationReport",
    "CrossValReport",
    "EffectItem",
    "EffectRow",
    "BoldPlayerSummary",
    "SubgroupRow",
    "ChallengeTheoryError",
    "ParseError",
    "InvalidInputError",
    "NumericalError",

    # Sample data
    "SampleData",
    "builtin_fixtures",
    "fixture_params",
    "get_problems_path",
    "list_available_samples",
]
