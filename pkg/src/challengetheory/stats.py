import math
from typing import Literal, NamedTuple, Optional, Sequence, Tuple
import numpy as np
from scipy.stats import norm
from challengetheory.datamodels import CorrelationReport
from challengetheory.exceptions import DomainError, InsufficientDataError, ZeroVarianceError

Alternative = Literal["larger", "smaller", "two-sided"]


class ProportionTest(NamedTuple):
    difference: float
    z: float
    p_value: float


def pearson_r(xs: Sequence[float], ys: Sequence[float]) -> float:
    """
    Product-moment correlation of two equally long vectors.

    Raises:
        InsufficientDataError: Fewer than 3 pairs or unequal lengths
        ZeroVarianceError: Either vector is constant
    """
    x = np.asarray(xs, dtype=float)
    y = np.asarray(ys, dtype=float)
    if x.shape != y.shape or x.ndim != 1:
        raise InsufficientDataError(f"pearson_r needs two vectors of equal length, got {x.shape} and {y.shape}")
    if x.size < 3:
        raise InsufficientDataError(f"pearson_r needs at least 3 pairs, got {x.size}")
    r = pearson_or_none(x, y)
    if r is None:
        raise ZeroVarianceError("pearson_r is undefined for a constant vector")
    return r


def pearson_or_none(xs: Sequence[float], ys: Sequence[float]) -> Optional[float]:
    """Pearson r of two vectors, or None when either has no variance or is not finite."""
    x = np.asarray(xs, dtype=float)
    y = np.asarray(ys, dtype=float)
    dx = x - x.mean()
    dy = y - y.mean()
    sxx = float(dx @ dx)
    syy = float(dy @ dy)
    if not (sxx > 0 and syy > 0) or not (math.isfinite(sxx) and math.isfinite(syy)):
        return None
    r = float(dx @ dy) / math.sqrt(sxx * syy)
    return min(1.0, max(-1.0, r))


def fisher_interval(r: float, n: int, level: float = 0.95) -> Tuple[float, float]:
    """
    Confidence interval for a correlation via the Fisher z-transform.

    z = atanh(r), half-width = q / sqrt(n - 3) with q the two-sided standard
    normal quantile for `level`; the bounds are tanh(z -/+ half-width).

    Raises:
        DomainError: |r| >= 1, n < 4 or level outside (0, 1)
    """
    if not abs(r) < 1:
        raise DomainError(f"fisher_interval needs |r| < 1, got {r}")
    if n < 4:
        raise DomainError(f"fisher_interval needs n >= 4, got {n}")
    if not 0 < level < 1:
        raise DomainError(f"level must be in (0, 1), got {level}")
    z = math.atanh(r)
    half_width = norm.ppf(0.5 + level / 2.0) / math.sqrt(n - 3)
    return math.tanh(z - half_width), math.tanh(z + half_width)


def correlation_report(r: float, n: int, level: float = 0.95) -> CorrelationReport:
    """CorrelationReport for r; a perfect correlation gets a zero-width interval."""
    if abs(r) >= 1 or n < 4:
        return CorrelationReport(r=r, n=n, ci_low=r, ci_high=r, level=level)
    low, high = fisher_interval(r, n, level)
    # tanh round-off must not push a bound across r
    return CorrelationReport(r=r, n=n, ci_low=min(low, r), ci_high=max(high, r), level=level)


def two_proportion_test(k1: int, n1: int, k2: int, n2: int,
                        alternative: Alternative = "larger",
                        continuity: bool = False) -> ProportionTest:
    """
    Pooled-variance z-test for the difference of two proportions.

    Args:
        k1, n1: Successes and size of the first group
        k2, n2: Successes and size of the second group
        alternative: "larger" (group 1 above group 2), "smaller" or "two-sided"
        continuity: Apply the 0.5*(1/n1 + 1/n2) continuity correction

    Returns:
        ProportionTest(difference, z, p_value)

    Raises:
        InsufficientDataError: A group is empty or a count is out of range
    """
    if n1 < 1 or n2 < 1:
        raise InsufficientDataError(f"both groups need at least one member, got n1={n1}, n2={n2}")
    if not (0 <= k1 <= n1 and 0 <= k2 <= n2):
        raise InsufficientDataError(f"counts out of range: {k1}/{n1}, {k2}/{n2}")

    difference = k1 / n1 - k2 / n2
    pooled = (k1 + k2) / (n1 + n2)
    se = math.sqrt(pooled * (1 - pooled) * (1 / n1 + 1 / n2))

    numerator = difference
    if continuity and difference != 0:
        correction = 0.5 * (1 / n1 + 1 / n2)
        numerator = math.copysign(max(abs(difference) - correction, 0.0), difference)

    z = numerator / se if se > 0 else 0.0
    if alternative == "larger":
        p_value = float(norm.sf(z))
    elif alternative == "smaller":
        p_value = float(norm.cdf(z))
    elif alternative == "two-sided":
        p_value = float(2 * norm.sf(abs(z)))
    else:
        raise DomainError(f"alternative must be larger, smaller or two-sided, got {alternative!r}")
    return ProportionTest(difference=difference, z=z, p_value=p_value)
