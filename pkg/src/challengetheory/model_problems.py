from typing import Tuple, Union
from decimal import Decimal
from challengetheory.datamodels import BinaryProblem, Prospect, Role, Domain, Choice
from challengetheory.exceptions import MixedSignError, DominanceError, DegenerateTieError, DomainError

ProspectLike = Union[Prospect, Tuple[Union[int, float, str, Decimal], Union[int, float, str, Decimal]]]

# Roles per domain: (default_role, bold_role)
ROLES_BY_DOMAIN = {
    "gain": ("P0", "P1"),
    "loss": ("P1", "P0"),
}


def _as_prospect(value: ProspectLike) -> Prospect:
    if isinstance(value, Prospect):
        return value
    outcome, probability = value
    return Prospect(outcome=outcome, probability=probability)


def _build(problem_id: str, x0, p0, x1, p1, domain: Domain) -> BinaryProblem:
    default_role, bold_role = ROLES_BY_DOMAIN[domain]
    return BinaryProblem(id=problem_id, x0=x0, p0=p0, x1=x1, p1=p1,
                         domain=domain, default_role=default_role, bold_role=bold_role)


def canonicalize_problem(a: ProspectLike, b: ProspectLike, problem_id: Union[str, int]) -> BinaryProblem:
    """
    Put two presented prospects into default/bold form.

    The higher-probability prospect becomes (x0, p0) and must carry the
    smaller absolute outcome. Gains make (x0, p0) the default, losses make
    (x1, p1) the default. The result does not depend on the order of a and b.

    Args:
        a: First presented prospect, a Prospect or an (outcome, probability) pair
        b: Second presented prospect
        problem_id: Identifier carried into the result

    Returns:
        The canonical BinaryProblem

    Raises:
        MixedSignError: One outcome is a gain and the other a loss
        DegenerateTieError: Equal probabilities or equal absolute outcomes
        DominanceError: The higher-probability prospect also has the larger
            absolute outcome, so no trade-off exists
    """
    a, b = _as_prospect(a), _as_prospect(b)

    if (a.outcome > 0) != (b.outcome > 0):
        raise MixedSignError(f"problem {problem_id}: mixed gain/loss outcomes ({a.outcome}, {b.outcome}) are not simple problems")
    if a.probability == b.probability:
        raise DegenerateTieError(f"problem {problem_id}: equal probabilities ({a.probability})")
    if abs(a.outcome) == abs(b.outcome):
        raise DegenerateTieError(f"problem {problem_id}: equal outcomes ({a.outcome})")

    likely, unlikely = (a, b) if a.probability > b.probability else (b, a)
    if abs(likely.outcome) > abs(unlikely.outcome):
        raise DominanceError(
            f"problem {problem_id}: ({likely.outcome}, {likely.probability}) has both the larger "
            f"absolute outcome and the larger probability")

    domain: Domain = "gain" if likely.outcome > 0 else "loss"
    return _build(str(problem_id), likely.outcome, likely.probability,
                  unlikely.outcome, unlikely.probability, domain)


def mirror_problem(problem: BinaryProblem) -> BinaryProblem:
    """The problem with all outcome signs switched; roles follow the new domain."""
    domain: Domain = "loss" if problem.domain == "gain" else "gain"
    return _build(problem.id, -problem.x0, problem.p0, -problem.x1, problem.p1, domain)


def is_bold_choice(problem: BinaryProblem, chosen: Role) -> bool:
    if chosen not in ("P0", "P1"):
        raise DomainError(f"chosen must be 'P0' or 'P1', got {chosen!r}")
    return chosen == problem.bold_role


def role_of(problem: BinaryProblem, prospect: ProspectLike) -> Role:
    """Which role of the problem a presented prospect ended up in."""
    prospect = _as_prospect(prospect)
    if prospect.outcome == problem.x0 and prospect.probability == problem.p0:
        return "P0"
    if prospect.outcome == problem.x1 and prospect.probability == problem.p1:
        return "P1"
    raise DomainError(f"({prospect.outcome}, {prospect.probability}) is not a prospect of problem {problem.id}")


def choice_of(problem: BinaryProblem, chosen: Role) -> Choice:
    return "bold" if is_bold_choice(problem, chosen) else "default"
