from typing import Union
import numpy as np
from challengetheory.datamodels import WeightingForm
from challengetheory.exceptions import DomainError

ArrayLike = Union[float, np.ndarray]


def _scalar_or_array(result: np.ndarray, like) -> ArrayLike:
    return float(result) if np.ndim(like) == 0 else result


def value(x: ArrayLike, a: float) -> ArrayLike:
    """
    Power value function x**a for an absolute outcome.

    Args:
        x: Absolute outcome(s), strictly positive
        a: Exponent, strictly positive

    Raises:
        DomainError: If any x <= 0 or a <= 0
    """
    values = np.asarray(x, dtype=float)
    if np.any(~(values > 0)):
        raise DomainError("value() takes absolute outcomes, which must be > 0")
    if not a > 0:
        raise DomainError(f"exponent must be > 0, got {a}")
    return _scalar_or_array(np.power(values, a), x)


def weight_array(p: np.ndarray, gamma: ArrayLike, delta: ArrayLike, form: WeightingForm) -> np.ndarray:
    """Unchecked vectorized weighting; p must already lie in [0, 1]."""
    if form == "identity":
        return np.array(p, dtype=float, copy=True)
    with np.errstate(divide="ignore", invalid="ignore"):
        p_gamma = np.power(p, gamma)
        q_gamma = np.power(1.0 - p, gamma)
        if form == "gw":
            weighted = delta * p_gamma / (delta * p_gamma + q_gamma)
        elif form == "tk92":
            weighted = p_gamma / np.power(p_gamma + q_gamma, 1.0 / gamma)
        else:
            raise DomainError(f"unknown weighting form {form!r}")
    # exact endpoints regardless of 0**gamma behaviour
    weighted = np.where(p == 0.0, 0.0, weighted)
    return np.where(p == 1.0, 1.0, weighted)


def weight(p: ArrayLike, gamma: float = 1.0, delta: float = 1.0, form: WeightingForm = "gw") -> ArrayLike:
    """
    Probability weighting w(p).

    gw is the linear-in-log-odds form delta*p^g / (delta*p^g + (1-p)^g),
    tk92 the one-parameter form p^g / (p^g + (1-p)^g)^(1/g) (delta unused),
    identity returns p. w(0) = 0 and w(1) = 1 exactly for every form.

    Raises:
        DomainError: p outside [0, 1] or non-positive gamma/delta
    """
    probs = np.asarray(p, dtype=float)
    if np.any(~((probs >= 0.0) & (probs <= 1.0))):
        raise DomainError("weight() takes probabilities in [0, 1]")
    if not (gamma > 0 and delta > 0):
        raise DomainError(f"gamma and delta must be > 0, got gamma={gamma}, delta={delta}")
    return _scalar_or_array(weight_array(probs, gamma, delta, form), p)
