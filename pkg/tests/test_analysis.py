from decimal import Decimal
import pytest
from challengetheory.analysis import classify_bold_players, effects_report, subgroup_analysis, with_subgroups
from challengetheory.datamodels import ChoiceDataset, EffectItem, RespondentRecord
from challengetheory.exceptions import DegenerateGroupError, EmptyDomainError, MismatchedPairError
from challengetheory.model_problems import canonicalize_problem
from challengetheory.samples import builtin_fixtures, fixture_params, synthetic_gain_problems
from challengetheory.synthetic import planted_dataset


@pytest.fixture(scope="module")
def fixtures():
    return builtin_fixtures()


@pytest.fixture
def gains(fixtures):
    return fixtures.params["params_gains"]


@pytest.fixture
def losses(fixtures):
    return fixtures.params["params_losses"]


class TestEffectsReport:
    def test_mirror_pairs_delta_positive(self, fixtures, gains, losses):
        rows = effects_report(fixtures.effect_items("mirror_pairs"), gains, losses)
        assert len(rows) == 5
        for row in rows:
            assert row.delta_ci_times_100 > 0
            assert row.delta_ci_times_100 == pytest.approx(row.ci_times_100[0] - row.ci_times_100[1])

    def test_published_deltas(self, fixtures, gains, losses):
        rows = effects_report(fixtures.effect_items("mirror_pairs"), gains, losses)
        for row, reference in zip(rows, fixtures.mirror_pairs):
            assert row.delta_ci_times_100 == pytest.approx(reference.delta_ci_x100_printed, abs=0.02)

    def test_single_and_same_domain_items(self, fixtures, gains, losses):
        rows = effects_report(fixtures.effect_items("effects"), gains, losses)
        by_label = {row.label: row for row in rows}
        assert by_label["certainty"].delta_ci_times_100 is None
        # certainty problem is more challenging than its scaled-down version
        assert by_label["certainty"].ci_values[0] > by_label["certainty"].ci_values[1]
        assert by_label["low probability"].p_bold_observed == [pytest.approx(0.65)]

    def test_observed_padding(self, fixtures, gains, losses):
        item = EffectItem(label="bare", problems=[fixtures.problems["la1_gain"], fixtures.problems["la1_loss"]])
        row = effects_report([item], gains, losses)[0]
        assert row.p_bold_observed == [None, None]

    def test_mismatched_pair(self, fixtures, gains, losses):
        item = EffectItem(label="bad", problems=[fixtures.problems["la1_gain"], fixtures.problems["la2_loss"]])
        with pytest.raises(MismatchedPairError):
            effects_report([item], gains, losses)


def _dataset(choices, genders=None, pay=None):
    gain = canonicalize_problem((100, 1), (200, 0.6), "g1")
    gain2 = canonicalize_problem((50, 0.9), (120, 0.4), "g2")
    loss = canonicalize_problem((-100, 1), (-200, 0.6), "l1")
    respondents = []
    for index, bold_ids in enumerate(choices):
        rid = f"r{index + 1}"
        respondents.append(RespondentRecord(
            respondent_id=rid,
            choices={pid: ("bold" if pid in bold_ids else "default") for pid in ("g1", "g2")},
            gender=(genders or {}).get(rid),
            hourly_pay=(pay or {}).get(rid),
        ))
    return ChoiceDataset(problems=[gain, gain2, loss], respondents=respondents)


class TestBoldPlayers:
    def test_threshold_is_strict(self):
        dataset = _dataset([{"g1", "g2"}, {"g1"}, set(), {"g2"}])
        summary = classify_bold_players(dataset, "gain")
        assert summary.threshold == pytest.approx(1.0)
        assert summary.counts == {"r1": 2, "r2": 1, "r3": 0, "r4": 1}
        assert summary.per_respondent == {"r1": True, "r2": False, "r3": False, "r4": False}

    def test_everyone_equal_means_nobody_bold(self):
        dataset = _dataset([{"g1"}, {"g2"}, {"g1"}])
        summary = classify_bold_players(dataset, "gain")
        assert not any(summary.per_respondent.values())

    def test_domain_without_answers(self):
        dataset = _dataset([{"g1"}, set()])
        with pytest.raises(EmptyDomainError):
            classify_bold_players(dataset, "loss")

    def test_respondent_without_domain_answers_skipped(self):
        base = _dataset([{"g1"}, set()])
        silent = RespondentRecord(respondent_id="r9", choices={})
        dataset = ChoiceDataset(problems=base.problems, respondents=base.respondents + [silent])
        summary = classify_bold_players(dataset, "gain")
        assert "r9" not in summary.counts


    def test_respondent_order_does_not_matter(self):
        dataset = planted_dataset(synthetic_gain_problems(), fixture_params("params_gains"),
                                  n_respondents=60, noise=0.05, seed=11)
        shuffled = ChoiceDataset(problems=dataset.problems, respondents=dataset.respondents[::-1])
        summary = classify_bold_players(dataset, "gain")
        reordered = classify_bold_players(shuffled, "gain")
        assert reordered.threshold == summary.threshold
        assert reordered.counts == summary.counts
        assert reordered.per_respondent == summary.per_respondent
        assert 0 < sum(summary.per_respondent.values()) < 60
        for attribute in ("gender", "earnings"):
            assert subgroup_analysis(reordered, attribute) == subgroup_analysis(summary, attribute)


class TestSubgroups:
    def test_gender_split(self):
        dataset = _dataset(
            [{"g1", "g2"}, {"g1", "g2"}, {"g1"}, set(), set(), {"g2"}],
            genders={"r1": "male", "r2": "male", "r3": "male", "r4": "female", "r5": "female", "r6": "other"},
        )
        summary = classify_bold_players(dataset, "gain")
        row = subgroup_analysis(summary, "gender")[0]
        assert (row.group_a, row.group_b) == ("male", "female")
        assert (row.n_a, row.n_b) == (3, 2)
        assert row.prop_a == pytest.approx(2 / 3)
        assert row.prop_b == 0.0
        assert row.difference == pytest.approx(2 / 3)
        assert row.p_value < 0.5

    def test_earnings_split_at_median(self):
        pay = {"r1": Decimal("30"), "r2": Decimal("20"), "r3": Decimal("10"), "r4": Decimal("10"), "r5": Decimal("0")}
        dataset = _dataset([{"g1", "g2"}, {"g1", "g2"}, set(), set(), set()], pay=pay)
        summary = classify_bold_players(dataset, "gain")
        row = subgroup_analysis(summary, "earnings")[0]
        # median 10: r1, r2 are above it, r3..r5 at or below
        assert (row.n_a, row.n_b) == (2, 3)
        assert row.prop_a == 1.0
        assert row.prop_b == 0.0

    def test_degenerate_group(self):
        dataset = _dataset([{"g1"}, set(), set()], genders={"r1": "male", "r2": "female", "r3": "female"})
        summary = classify_bold_players(dataset, "gain")
        with pytest.raises(DegenerateGroupError):
            subgroup_analysis(summary, "gender")

    def test_with_subgroups_skips_degenerate(self):
        pay = {"r1": Decimal("30"), "r2": Decimal("20"), "r3": Decimal("10"), "r4": Decimal("5")}
        dataset = _dataset([{"g1"}, {"g1"}, set(), set()], genders={"r1": "male"}, pay=pay)
        summary = classify_bold_players(dataset, "gain")
        with pytest.raises(DegenerateGroupError):
            with_subgroups(summary)
        enriched = with_subgroups(summary, skip_degenerate=True)
        assert [row.split_label for row in enriched.subgroup_rows] == ["earnings"]
        assert summary.subgroup_rows == []
