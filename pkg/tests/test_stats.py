import math
import pytest
import numpy as np
from challengetheory.exceptions import DomainError, InsufficientDataError, ZeroVarianceError
from challengetheory.stats import correlation_report, fisher_interval, pearson_or_none, pearson_r, two_proportion_test


class TestPearson:
    def test_perfect_correlations(self):
        xs = [1.0, 2.0, 4.0, 7.0]
        assert pearson_r(xs, xs) == pytest.approx(1.0)
        assert pearson_r(xs, [-2 * x + 7 for x in xs]) == pytest.approx(-1.0)

    def test_hand_computed(self):
        assert pearson_r([1, 2, 3], [2, 2, 5]) == pytest.approx(math.sqrt(3) / 2, abs=1e-12)

    def test_affine_invariance(self):
        rng = np.random.default_rng(5)
        x = rng.normal(size=30)
        y = x + rng.normal(size=30)
        r = pearson_r(x, y)
        assert pearson_r(3 * x + 2, y) == pytest.approx(r, abs=1e-12)
        assert pearson_r(-0.5 * x, y) == pytest.approx(-r, abs=1e-12)

    def test_errors(self):
        with pytest.raises(InsufficientDataError):
            pearson_r([1, 2], [1, 2])
        with pytest.raises(InsufficientDataError):
            pearson_r([1, 2, 3], [1, 2])
        with pytest.raises(ZeroVarianceError):
            pearson_r([1, 1, 1], [1, 2, 3])

    def test_or_none_matches_pearson_r(self):
        xs, ys = [1.0, 2.0, 4.0, 7.0], [3.0, 1.0, 2.0, 0.5]
        assert pearson_or_none(xs, ys) == pytest.approx(pearson_r(xs, ys), abs=1e-15)
        assert pearson_or_none(np.array(xs), np.array(ys)) == pytest.approx(pearson_r(xs, ys), abs=1e-15)

    def test_or_none_without_variance(self):
        assert pearson_or_none([2.0, 2.0, 2.0], [1.0, 2.0, 3.0]) is None
        assert pearson_or_none([1.0, 2.0, 3.0], [0.0, 0.0, 0.0]) is None


@pytest.mark.parametrize("r, n, low, high, tol", [
    (-0.919, 22, -0.966, -0.813, 1e-3),
    (-0.931, 22, -0.971, -0.839, 1e-3),
    (-0.877, 44, -0.929, -0.780, 5e-3),
    (-0.989, 11, -0.997, -0.956, 1e-3),
])
def test_fisher_interval_published(r, n, low, high, tol):
    got_low, got_high = fisher_interval(r, n)
    assert got_low == pytest.approx(low, abs=tol)
    assert got_high == pytest.approx(high, abs=tol)


def test_fisher_interval_properties():
    low, high = fisher_interval(0.0, 30)
    assert low == pytest.approx(-high)
    for r in (-0.9, -0.3, 0.2, 0.75):
        widths = []
        for n in (5, 10, 50, 200):
            lo, hi = fisher_interval(r, n)
            assert lo < r < hi
            widths.append(hi - lo)
            mirrored = fisher_interval(-r, n)
            assert mirrored[0] == pytest.approx(-hi) and mirrored[1] == pytest.approx(-lo)
        assert widths == sorted(widths, reverse=True)


def test_fisher_interval_domain():
    with pytest.raises(DomainError):
        fisher_interval(1.0, 20)
    with pytest.raises(DomainError):
        fisher_interval(0.5, 3)


def test_correlation_report_brackets_r():
    report = correlation_report(-0.919, 22)
    assert report.ci_low <= report.r <= report.ci_high
    perfect = correlation_report(-1.0, 22)
    assert perfect.ci_low == perfect.ci_high == -1.0


class TestTwoProportion:
    def test_equal_proportions(self):
        result = two_proportion_test(10, 40, 5, 20)
        assert result.difference == 0
        assert result.z == 0
        assert result.p_value == pytest.approx(0.5)

    def test_reference_case(self):
        result = two_proportion_test(30, 50, 20, 50)
        assert result.difference == pytest.approx(0.2)
        assert result.z == pytest.approx(2.0)
        assert result.p_value == pytest.approx(0.02275, abs=1e-4)

    def test_extreme_separation(self):
        result = two_proportion_test(50, 50, 0, 50)
        assert result.difference == 1.0
        assert result.p_value < 1e-10

    def test_antisymmetry(self):
        forward = two_proportion_test(18, 33, 11, 29)
        backward = two_proportion_test(11, 29, 18, 33)
        assert backward.difference == pytest.approx(-forward.difference)
        assert backward.z == pytest.approx(-forward.z)

    def test_alternatives_and_continuity(self):
        larger = two_proportion_test(30, 50, 20, 50, alternative="larger")
        two_sided = two_proportion_test(30, 50, 20, 50, alternative="two-sided")
        corrected = two_proportion_test(30, 50, 20, 50, continuity=True)
        assert two_sided.p_value == pytest.approx(2 * larger.p_value)
        assert corrected.z < larger.z

    def test_empty_group(self):
        with pytest.raises(InsufficientDataError):
            two_proportion_test(0, 0, 1, 5)
