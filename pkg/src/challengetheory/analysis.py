import logging
from typing import Dict, List, Sequence, Tuple
import numpy as np
from challengetheory.datamodels import (
    BinaryProblem, BoldPlayerSummary, ChoiceDataset, Domain, EffectItem, EffectRow, ParamSet,
    SubgroupAttribute, SubgroupRow,
)
from challengetheory.exceptions import DegenerateGroupError, DomainError, EmptyDomainError, MismatchedPairError
from challengetheory.model_challenge import challenge_index
from challengetheory.model_problems import mirror_problem
from challengetheory.stats import Alternative, two_proportion_test

logger = logging.getLogger(__name__)

MIN_GROUP_SIZE = 2

# (group a, group b) of each subgroup split
SPLIT_GROUPS: Dict[str, Tuple[str, str]] = {"gender": ("male", "female"), "earnings": ("rich", "poor")}


def _same_prospects(a: BinaryProblem, b: BinaryProblem) -> bool:
    return (a.x0, a.p0, a.x1, a.p1) == (b.x0, b.p0, b.x1, b.p1)


def effects_report(items: Sequence[EffectItem], params_gain: ParamSet, params_loss: ParamSet) -> List[EffectRow]:
    """
    Challenge indices for single problems and problem pairs.

    Each problem is evaluated with the parameters of its own domain. A pair
    made of a gain problem and a loss problem must be mirror images; for such
    pairs the row carries (CI+ - CI-) * 100.

    Raises:
        MismatchedPairError: A gain/loss pair whose loss member is not the
            mirror of its gain member
    """
    rows = []
    for item in items:
        ci_values = [challenge_index(p, params_gain if p.domain == "gain" else params_loss)
                     for p in item.problems]
        delta = None
        if len(item.problems) == 2 and item.problems[0].domain != item.problems[1].domain:
            gain_index = 0 if item.problems[0].domain == "gain" else 1
            gain, loss = item.problems[gain_index], item.problems[1 - gain_index]
            if not _same_prospects(mirror_problem(gain), loss):
                raise MismatchedPairError(f"{item.label}: loss problem {loss.id} is not the mirror of gain problem {gain.id}")
            delta = (ci_values[gain_index] - ci_values[1 - gain_index]) * 100.0

        observed = list(item.p_bold_observed) + [None] * (len(item.problems) - len(item.p_bold_observed))
        rows.append(EffectRow(
            label=item.label,
            problems=item.problems,
            p_bold_observed=observed[:len(item.problems)],
            ci_values=ci_values,
            ci_times_100=[ci * 100.0 for ci in ci_values],
            delta_ci_times_100=delta,
        ))
    return rows


def classify_bold_players(dataset: ChoiceDataset, domain: Domain) -> BoldPlayerSummary:
    """
    Mark respondents whose bold-choice count in a domain exceeds the sample mean.

    Respondents without any answer in the domain are left out (and logged).

    Raises:
        EmptyDomainError: No problems of the domain, or nobody answered one
    """
    problem_ids = [p.id for p in dataset.problems_in(domain)]
    if not problem_ids:
        raise EmptyDomainError(f"dataset has no {domain} problems")

    counts: Dict[str, int] = {}
    included = []
    for respondent in dataset.respondents:
        answered = [respondent.choices[pid] for pid in problem_ids if pid in respondent.choices]
        if not answered:
            logger.warning("respondent %s answered no %s problem; left out", respondent.respondent_id, domain)
            continue
        counts[respondent.respondent_id] = sum(1 for choice in answered if choice == "bold")
        included.append(respondent)
    if not counts:
        raise EmptyDomainError(f"no respondent answered a {domain} problem")

    total = sum(counts.values())
    n = len(counts)
    # integer comparison: count > total / n
    per_respondent = {rid: count * n > total for rid, count in counts.items()}
    return BoldPlayerSummary(
        domain=domain,
        threshold=total / n,
        counts=counts,
        per_respondent=per_respondent,
        genders={r.respondent_id: r.gender for r in included},
        hourly_pay={r.respondent_id: r.hourly_pay for r in included},
    )


def _split(summary: BoldPlayerSummary, attribute: SubgroupAttribute) -> Tuple[str, str, List[str], List[str]]:
    if attribute == "gender":
        males = [rid for rid, g in summary.genders.items() if g == "male"]
        females = [rid for rid, g in summary.genders.items() if g == "female"]
        excluded = len(summary.per_respondent) - len(males) - len(females)
        if excluded:
            logger.warning("%d respondents without male/female gender left out of the gender split", excluded)
        return (*SPLIT_GROUPS["gender"], males, females)
    if attribute == "earnings":
        paid = {rid: pay for rid, pay in summary.hourly_pay.items() if pay is not None}
        excluded = len(summary.per_respondent) - len(paid)
        if excluded:
            logger.warning("%d respondents without hourly pay left out of the earnings split", excluded)
        if not paid:
            return (*SPLIT_GROUPS["earnings"], [], [])
        median = np.median([float(pay) for pay in paid.values()])
        rich = [rid for rid, pay in paid.items() if float(pay) > median]
        poor = [rid for rid, pay in paid.items() if float(pay) <= median]
        return (*SPLIT_GROUPS["earnings"], rich, poor)
    raise DomainError(f"unknown subgroup attribute {attribute!r}")


def subgroup_analysis(summary: BoldPlayerSummary, attribute: SubgroupAttribute,
                      alternative: Alternative = "larger", continuity: bool = False) -> List[SubgroupRow]:
    """
    Share of bold players in two groups and a two-proportion z-test.

    gender compares male (group a) with female; earnings compares pay above
    the sample median (group a) with pay at or below it.

    Raises:
        DegenerateGroupError: A group has fewer than 2 members
    """
    label_a, label_b, group_a, group_b = _split(summary, attribute)
    if len(group_a) < MIN_GROUP_SIZE or len(group_b) < MIN_GROUP_SIZE:
        raise DegenerateGroupError(
            f"{attribute} split of {summary.domain} bold players needs {MIN_GROUP_SIZE}+ per group, "
            f"got {label_a}={len(group_a)}, {label_b}={len(group_b)}")

    k_a = sum(summary.per_respondent[rid] for rid in group_a)
    k_b = sum(summary.per_respondent[rid] for rid in group_b)
    test = two_proportion_test(k_a, len(group_a), k_b, len(group_b), alternative, continuity)
    return [SubgroupRow(
        domain=summary.domain,
        split_label=attribute,
        group_a=label_a,
        group_b=label_b,
        n_a=len(group_a),
        n_b=len(group_b),
        prop_a=k_a / len(group_a),
        prop_b=k_b / len(group_b),
        difference=test.difference,
        z=test.z,
        p_value=test.p_value,
    )]


def with_subgroups(summary: BoldPlayerSummary,
                   attributes: Sequence[SubgroupAttribute] = ("gender", "earnings"),
                   alternative: Alternative = "larger",
                   continuity: bool = False,
                   skip_degenerate: bool = False) -> BoldPlayerSummary:
    """Summary with subgroup rows for every attribute attached."""
    rows: List[SubgroupRow] = []
    for attribute in attributes:
        try:
            rows.extend(subgroup_analysis(summary, attribute, alternative, continuity))
        except DegenerateGroupError as exc:
            if not skip_degenerate:
                raise
            logger.warning("skipping %s split: %s", attribute, exc)
    return summary.model_copy(update={"subgroup_rows": rows})
