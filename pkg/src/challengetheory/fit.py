import logging
from concurrent.futures import ThreadPoolExecutor
from typing import List, Optional, Sequence, Tuple
import numpy as np
from scipy.optimize import minimize
from scipy.stats import qmc
from challengetheory.datamodels import (
    ChoiceDataset, ComparisonRow, DomainFilter, FitResult, ParamSet, ProblemObservation,
    SearchConfig, Tying, WeightingForm,
)
from challengetheory.exceptions import DegenerateObjectiveError, EmptyProblemError, TooFewProblemsError
from challengetheory.model_challenge import challenge_index_array, challenge_indices, problem_arrays
from challengetheory.stats import correlation_report, pearson_or_none, pearson_r

logger = logging.getLogger(__name__)

MIN_OBSERVATIONS = 4

# Variants examined when no list is given: every tying for the two-parameter
# weighting form, the one-parameter form, and the parameter-free baseline
DEFAULT_VARIANTS: List[Tuple[Tying, WeightingForm]] = [
    ("three", "gw"), ("four", "gw"), ("six", "gw"),
    ("four", "tk92"),
    ("three", "identity"),
]

# Smaller model each tying is warm-started from
_NESTED_UNDER = {"four": "three", "six": "four"}


def bold_proportions(dataset: ChoiceDataset, domain_filter: Optional[DomainFilter] = None) -> List[ProblemObservation]:
    """
    Proportion of bold choices per problem among respondents who answered it.

    Args:
        dataset: Problems and respondents
        domain_filter: "gain", "loss", "all" or None (all problems)

    Raises:
        EmptyProblemError: A selected problem has no recorded choice
    """
    problems = dataset.problems_in(domain_filter or "all")
    observations = []
    for problem in problems:
        answers = [r.choices[problem.id] for r in dataset.respondents if problem.id in r.choices]
        if not answers:
            raise EmptyProblemError(f"problem {problem.id} has no recorded choices")
        n_bold = sum(1 for choice in answers if choice == "bold")
        observations.append(ProblemObservation(problem=problem, p_bold=n_bold / len(answers),
                                               n_respondents=len(answers)))
    return observations


def _reflect(z: np.ndarray, low: np.ndarray, high: np.ndarray) -> np.ndarray:
    """Fold an unconstrained point back into the box by mirroring at the bounds."""
    width = high - low
    folded = np.mod(z - low, 2.0 * width)
    folded = np.where(folded > width, 2.0 * width - folded, folded)
    return np.clip(low + folded, low, high)


class _Objective:
    """r(CI, P_b) as a function of the free parameter vector; rejected candidates get the penalty."""

    def __init__(self, observations: Sequence[ProblemObservation], tying: Tying,
                 weighting_form: WeightingForm, low: np.ndarray, high: np.ndarray, penalty: float):
        self.arrays = problem_arrays([o.problem for o in observations])
        self.p_bold = np.array([o.p_bold for o in observations], dtype=float)
        self.tying = tying
        self.weighting_form = weighting_form
        self.names = ParamSet.free_names(tying, weighting_form)
        self.low = low
        self.high = high
        self.penalty = penalty

    def theta(self, free: np.ndarray) -> Tuple[float, float, float, float, float, float]:
        values = dict(zip(self.names, (float(v) for v in free)))
        full = {}
        for family in ("a", "gamma", "delta"):
            tied = values.get(family, 1.0)
            full[f"{family}0"] = values.get(f"{family}0", tied)
            full[f"{family}1"] = values.get(f"{family}1", tied)
        return full["a0"], full["a1"], full["gamma0"], full["gamma1"], full["delta0"], full["delta1"]

    def __call__(self, z: np.ndarray) -> float:
        free = _reflect(np.asarray(z, dtype=float), self.low, self.high)
        ci, _, gap = challenge_index_array(*self.arrays, self.theta(free), self.weighting_form)
        if not np.all(gap > 0) or not np.all(np.isfinite(ci)):
            return self.penalty
        r = pearson_or_none(ci, self.p_bold)
        return self.penalty if r is None else r


def _start_grid(n_free: int, starts: int, seed: int, low: np.ndarray, high: np.ndarray) -> np.ndarray:
    if starts == 0:
        return np.zeros((0, n_free))
    sampler = qmc.LatinHypercube(d=n_free, seed=seed)
    return qmc.scale(sampler.random(n=starts), low, high)


def _run_start(objective: _Objective, x0: np.ndarray, config: SearchConfig) -> Tuple[float, np.ndarray, int, bool]:
    result = minimize(objective, x0, method="Nelder-Mead",
                      options={"xatol": config.tolerance, "fatol": config.tolerance,
                               "maxfev": config.max_evaluations, "maxiter": config.max_evaluations})
    free = _reflect(np.asarray(result.x, dtype=float), objective.low, objective.high)
    return float(result.fun), free, int(result.nfev), bool(result.success)


def _build_result(observations: Sequence[ProblemObservation], params: ParamSet, evaluations: int,
                  starts: int, converged: bool, seed: int) -> FitResult:
    problems = [o.problem for o in observations]
    p_bold = [o.p_bold for o in observations]
    ci_values = challenge_indices(problems, params)
    r = pearson_r(ci_values, p_bold)
    return FitResult(
        params=params,
        r=r,
        correlation_report=correlation_report(r, len(observations)),
        problem_ids=[p.id for p in problems],
        ci_values=[float(c) for c in ci_values],
        p_bold=p_bold,
        objective_evaluations=evaluations,
        starts=starts,
        converged=converged,
        seed=seed,
    )


def fit_params(observations: Sequence[ProblemObservation],
               tying: Tying = "four",
               weighting_form: WeightingForm = "gw",
               search_config: Optional[SearchConfig] = None,
               warm_start: Optional[ParamSet] = None) -> FitResult:
    """
    Search the parameters that make r(CI, P_b) as negative as possible.

    Multi-start downhill simplex inside the search box: a seeded
    Latin-hypercube grid of starts, one neutral start (a = gamma = delta = 1)
    and, for the four- and six-parameter tyings, the optimum of the next
    smaller tying, so larger models never fit worse than the ones they contain.

    Args:
        observations: Problems with observed bold proportions (at least 4)
        tying: "three", "four" or "six"
        weighting_form: "gw", "tk92" or "identity" (no search needed)
        search_config: Start count, seed, evaluation budget, tolerance, box
        warm_start: Extra start; when omitted for four/six the smaller model is fitted first

    Returns:
        FitResult whose r is recomputed from the returned parameters

    Raises:
        TooFewProblemsError: Fewer than 4 observations
        DegenerateObjectiveError: No candidate gives a defined correlation
    """
    config = search_config or SearchConfig()
    if len(observations) < MIN_OBSERVATIONS:
        raise TooFewProblemsError(f"fitting needs at least {MIN_OBSERVATIONS} problems, got {len(observations)}")
    if len({o.p_bold for o in observations}) < 2:
        raise DegenerateObjectiveError("observed bold proportions are all equal; r is undefined")

    if weighting_form == "identity":
        params = ParamSet(tying=tying, weighting_form="identity")
        return _build_result(observations, params, evaluations=0, starts=0, converged=True, seed=config.seed)

    if warm_start is None and tying in _NESTED_UNDER:
        smaller = fit_params(observations, _NESTED_UNDER[tying], weighting_form, config)
        warm_start = smaller.params

    names = ParamSet.free_names(tying, weighting_form)
    boxes = [config.box(name, weighting_form) for name in names]
    low = np.array([b[0] for b in boxes])
    high = np.array([b[1] for b in boxes])
    objective = _Objective(observations, tying, weighting_form, low, high, config.penalty)

    starts = list(_start_grid(len(names), config.starts, config.seed, low, high))
    starts.append(np.clip(np.ones(len(names)), low, high))
    if warm_start is not None:
        widened = warm_start.retie(tying) if warm_start.tying != tying else warm_start
        starts.append(np.clip(np.array(widened.free_values()), low, high))

    logger.debug("fitting %s/%s on %d problems from %d starts", weighting_form, tying, len(observations), len(starts))
    if config.jobs > 1:
        with ThreadPoolExecutor(max_workers=config.jobs) as pool:
            runs = list(pool.map(lambda x0: _run_start(objective, x0, config), starts))
    else:
        runs = [_run_start(objective, x0, config) for x0 in starts]

    evaluations = sum(run[2] for run in runs)
    feasible = [run for run in runs if run[0] < config.penalty]
    if not feasible:
        raise DegenerateObjectiveError(
            f"no {tying}/{weighting_form} candidate gave a defined correlation with positive weight gaps")
    # minimum r; ties go to the lexicographically smallest parameter vector
    best_value, best_free, _, best_converged = min(feasible, key=lambda run: (run[0], tuple(run[1])))

    params = ParamSet(**dict(zip(("a0", "a1", "gamma0", "gamma1", "delta0", "delta1"), objective.theta(best_free))),
                      tying=tying, weighting_form=weighting_form)
    result = _build_result(observations, params, evaluations, len(starts), best_converged, config.seed)
    logger.info("%s/%s fit: r = %.4f after %d evaluations", weighting_form, tying, result.r, evaluations)
    return result


def model_comparison(observations: Sequence[ProblemObservation],
                     variants: Optional[Sequence[Tuple[Tying, WeightingForm]]] = None,
                     search_config: Optional[SearchConfig] = None) -> List[ComparisonRow]:
    """
    Fit several model variants on the same observations.

    Within a weighting form the tyings are fitted from small to large, each
    warm-started from the previous optimum. Rows are sorted by |r|
    descending, ties going to fewer free parameters.
    """
    variants = list(variants or DEFAULT_VARIANTS)
    order = {"three": 0, "four": 1, "six": 2}
    fitted = {}
    for tying, form in sorted(variants, key=lambda v: (v[1], order[v[0]])):
        if form == "identity":
            fitted[(tying, form)] = fit_params(observations, tying, form, search_config)
            continue
        # fill in the chain of smaller models so every warm start exists
        chain = ["three", "four", "six"][:order[tying] + 1]
        previous: Optional[ParamSet] = None
        for step in chain:
            key = (step, form)
            if key not in fitted:
                fitted[key] = fit_params(observations, step, form, search_config, warm_start=previous)
            previous = fitted[key].params

    rows = []
    for tying, form in variants:
        result = fitted[(tying, form)]
        rows.append(ComparisonRow(tying=tying, weighting_form=form, n_free=result.params.n_free,
                                  r=result.r, params=result.params, fit=result))
    return sorted(rows, key=lambda row: (-abs(row.r), row.n_free))
