"""
Synthetic choice data generated from a planted parameter set.

Bold proportions follow p_bold = clamp(intercept - slope * CI) plus Gaussian
noise, which gives fitting and cross-validation a known ground truth.
"""
import logging
from decimal import Decimal
from typing import List, Optional, Sequence, Tuple
import numpy as np
from challengetheory.datamodels import BinaryProblem, ChoiceDataset, ParamSet, ProblemObservation, RespondentRecord
from challengetheory.model_challenge import challenge_indices

logger = logging.getLogger(__name__)

DEFAULT_INTERCEPT = 0.9
DEFAULT_SLOPE = 8.0
DEFAULT_CLAMP = (0.02, 0.98)
DEFAULT_RESPONDENTS = 126
SHARE_POSITIVE_PAY = 0.7857


def _planted_ci(problems: Sequence[BinaryProblem], params: ParamSet, params_loss: Optional[ParamSet]) -> np.ndarray:
    loss_params = params_loss or params
    ci = np.zeros(len(problems))
    for domain, domain_params in (("gain", params), ("loss", loss_params)):
        index = [i for i, p in enumerate(problems) if p.domain == domain]
        if index:
            ci[index] = challenge_indices([problems[i] for i in index], domain_params)
    return ci


def planted_proportions(problems: Sequence[BinaryProblem], params: ParamSet,
                        params_loss: Optional[ParamSet] = None,
                        intercept: float = DEFAULT_INTERCEPT,
                        slope: float = DEFAULT_SLOPE,
                        noise: float = 0.0,
                        clamp: Tuple[float, float] = DEFAULT_CLAMP,
                        rng: Optional[np.random.Generator] = None) -> np.ndarray:
    """Target bold proportions, clamped first, then noised, then kept inside [0, 1]."""
    ci = _planted_ci(problems, params, params_loss)
    target = np.clip(intercept - slope * ci, clamp[0], clamp[1])
    if noise > 0:
        rng = rng or np.random.default_rng(0)
        target = target + rng.normal(0.0, noise, size=target.shape)
    return np.clip(target, 0.0, 1.0)


def planted_observations(problems: Sequence[BinaryProblem], params: ParamSet,
                         params_loss: Optional[ParamSet] = None,
                         intercept: float = DEFAULT_INTERCEPT,
                         slope: float = DEFAULT_SLOPE,
                         noise: float = 0.0,
                         clamp: Tuple[float, float] = DEFAULT_CLAMP,
                         n_respondents: int = DEFAULT_RESPONDENTS,
                         seed: int = 0) -> List[ProblemObservation]:
    """
    Problem-level observations whose bold proportions follow the planted law.

    Args:
        problems: Canonical problems
        params: Planted parameters (used for loss problems too unless params_loss is given)
        noise: Standard deviation of the Gaussian noise added after clamping
        n_respondents: Recorded as each observation's respondent count
        seed: Seed of the noise generator
    """
    p_bold = planted_proportions(problems, params, params_loss, intercept, slope, noise, clamp,
                                 np.random.default_rng(seed))
    return [ProblemObservation(problem=problem, p_bold=float(p), n_respondents=n_respondents)
            for problem, p in zip(problems, p_bold)]


def planted_dataset(problems: Sequence[BinaryProblem], params: ParamSet,
                    params_loss: Optional[ParamSet] = None,
                    n_respondents: int = DEFAULT_RESPONDENTS,
                    intercept: float = DEFAULT_INTERCEPT,
                    slope: float = DEFAULT_SLOPE,
                    noise: float = 0.0,
                    clamp: Tuple[float, float] = DEFAULT_CLAMP,
                    seed: int = 0) -> ChoiceDataset:
    """
    Respondent-level dataset following the planted law.

    Every problem gets exactly round(p_bold * n_respondents) bold choices,
    assigned to a random subset of respondents. Gender is drawn male/female
    with equal odds; hourly pay is zero for about a fifth of the respondents
    and log-normal otherwise.
    """
    rng = np.random.default_rng(seed)
    target = planted_proportions(problems, params, params_loss, intercept, slope, noise, clamp, rng)
    ids = [f"r{i + 1:03d}" for i in range(n_respondents)]

    choices = [dict() for _ in ids]
    for problem, p in zip(problems, target):
        n_bold = int(round(float(p) * n_respondents))
        bold = set(rng.permutation(n_respondents)[:n_bold].tolist())
        for i in range(n_respondents):
            choices[i][problem.id] = "bold" if i in bold else "default"

    genders = rng.choice(["male", "female"], size=n_respondents)
    has_pay = rng.random(n_respondents) < SHARE_POSITIVE_PAY
    pay = np.round(rng.lognormal(mean=3.0, sigma=0.5, size=n_respondents), 2)

    respondents = [
        RespondentRecord(
            respondent_id=rid,
            choices=choices[i],
            gender=str(genders[i]),
            hourly_pay=Decimal(f"{pay[i]:.2f}") if has_pay[i] else Decimal("0"),
        )
        for i, rid in enumerate(ids)
    ]
    logger.debug("planted dataset: %d problems x %d respondents, seed %d", len(problems), n_respondents, seed)
    return ChoiceDataset(problems=list(problems), respondents=respondents)
