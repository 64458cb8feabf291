from typing import List, Sequence, Tuple
import math
import numpy as np
from challengetheory.datamodels import BinaryProblem, ParamSet, WeightingForm
from challengetheory.exceptions import NonPositiveWeightGapError
from challengetheory.model_weighting import weight_array

# Above this |x|**a the outcome ratio is formed in log space
MAGNITUDE_THRESHOLD = 1e100


def problem_arrays(problems: Sequence[BinaryProblem]) -> Tuple[np.ndarray, np.ndarray, np.ndarray, np.ndarray]:
    """Column arrays |x0|, p0, |x1|, p1 for a list of problems."""
    rows = np.array([p.magnitudes() for p in problems], dtype=float).reshape(-1, 4)
    return rows[:, 0], rows[:, 1], rows[:, 2], rows[:, 3]


def outcome_factor_array(x0: np.ndarray, x1: np.ndarray, a0: float, a1: float,
                         magnitude_threshold: float = MAGNITUDE_THRESHOLD) -> np.ndarray:
    log_num = a0 * np.log(x0)
    log_den = a1 * np.log(x1)
    in_logs = np.maximum(log_num, log_den) > math.log(magnitude_threshold)
    with np.errstate(over="ignore", invalid="ignore"):
        direct = np.power(x0, a0) / np.power(x1, a1)
    return np.where(in_logs, np.exp(log_num - log_den), direct)


def probability_factor_array(p0: np.ndarray, p1: np.ndarray,
                             gamma0: float, gamma1: float, delta0: float, delta1: float,
                             form: WeightingForm) -> np.ndarray:
    return weight_array(p0, gamma0, delta0, form) - weight_array(p1, gamma1, delta1, form)


def challenge_index_array(x0: np.ndarray, p0: np.ndarray, x1: np.ndarray, p1: np.ndarray,
                          theta: Tuple[float, float, float, float, float, float],
                          form: WeightingForm,
                          magnitude_threshold: float = MAGNITUDE_THRESHOLD) -> Tuple[np.ndarray, np.ndarray, np.ndarray]:
    """
    Unchecked vectorized challenge index.

    Returns:
        (ci, outcome_factor, probability_factor); callers decide what to do
        with non-positive probability factors.
    """
    a0, a1, gamma0, gamma1, delta0, delta1 = theta
    outcome = outcome_factor_array(x0, x1, a0, a1, magnitude_threshold)
    probability = probability_factor_array(p0, p1, gamma0, gamma1, delta0, delta1, form)
    return outcome * probability, outcome, probability


def _evaluate(problems: Sequence[BinaryProblem], params: ParamSet,
              magnitude_threshold: float) -> Tuple[np.ndarray, np.ndarray, np.ndarray]:
    x0, p0, x1, p1 = problem_arrays(problems)
    ci, outcome, probability = challenge_index_array(x0, p0, x1, p1, params.as_tuple(),
                                                     params.weighting_form, magnitude_threshold)
    bad = [problems[i].id for i in np.flatnonzero(~(probability > 0))]
    if bad:
        raise NonPositiveWeightGapError(
            f"w0(p0) - w1(p1) <= 0 for problems {bad} under {params.tying}-parameter {params.weighting_form} weights")
    return ci, outcome, probability


def challenge_indices(problems: Sequence[BinaryProblem], params: ParamSet,
                      magnitude_threshold: float = MAGNITUDE_THRESHOLD) -> np.ndarray:
    """Challenge index for every problem, in order."""
    if not problems:
        return np.zeros(0)
    return _evaluate(problems, params, magnitude_threshold)[0]


def challenge_index(problem: BinaryProblem, params: ParamSet,
                    magnitude_threshold: float = MAGNITUDE_THRESHOLD) -> float:
    """
    CI = (|x0|^a0 / |x1|^a1) * (w0(p0) - w1(p1)).

    The same formula serves gains and losses because the canonical form
    always puts the smaller absolute outcome in x0.

    Raises:
        NonPositiveWeightGapError: If w0(p0) - w1(p1) <= 0 (only possible
            when the two weighting functions are untied)
    """
    return float(_evaluate([problem], params, magnitude_threshold)[0][0])


def ci_outcome_factor(problem: BinaryProblem, params: ParamSet,
                      magnitude_threshold: float = MAGNITUDE_THRESHOLD) -> float:
    return float(_evaluate([problem], params, magnitude_threshold)[1][0])


def ci_probability_factor(problem: BinaryProblem, params: ParamSet,
                          magnitude_threshold: float = MAGNITUDE_THRESHOLD) -> float:
    return float(_evaluate([problem], params, magnitude_threshold)[2][0])


def challenge_table(problems: Sequence[BinaryProblem], params: ParamSet) -> List[dict]:
    """Per-problem CI, CI*100 and both factors, for reports."""
    if not problems:
        return []
    ci, outcome, probability = _evaluate(problems, params, MAGNITUDE_THRESHOLD)
    return [
        {
            "id": problem.id,
            "domain": problem.domain,
            "ci": float(ci[i]),
            "ci_x100": float(ci[i]) * 100.0,
            "outcome_factor": float(outcome[i]),
            "probability_factor": float(probability[i]),
        }
        for i, problem in enumerate(problems)
    ]
