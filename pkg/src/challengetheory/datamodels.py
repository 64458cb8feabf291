from decimal import Decimal
from typing import Any, Dict, List, Literal, Optional, Tuple

from pydantic import BaseModel, Field, field_validator, model_validator

# Closed vocabularies
Domain = Literal["gain", "loss"]
DomainFilter = Literal["gain", "loss", "all"]
Role = Literal["P0", "P1"]
Choice = Literal["default", "bold"]
Gender = Literal["male", "female", "other"]
Tying = Literal["three", "four", "six"]
WeightingForm = Literal["gw", "tk92", "identity"]
ParameterFamily = Literal["a", "gamma", "delta"]
SubgroupAttribute = Literal["gender", "earnings"]
PresentedLabel = Literal["A", "B"]
OutputFormat = Literal["csv", "json"]
EffectTable = Literal["mirror_pairs", "effects", "table5", "table4"]

# Upper limits of a valid ParamSet; lower limits are open at zero
PARAMETER_LIMITS: Dict[str, float] = {"a": 5.0, "gamma": 3.0, "delta": 10.0}

# Below this curvature the one-parameter weighting form stops being monotone
TK92_GAMMA_MIN = 0.28

# Published table names accepted for the two effect tables
EFFECT_TABLE_ALIASES: Dict[str, str] = {"table5": "mirror_pairs", "table4": "effects"}

FROZEN = {"frozen": True, "extra": "forbid"}


def _as_decimal(value: Any) -> Any:
    # floats go through repr so 0.8 stays Decimal('0.8')
    if isinstance(value, bool):
        return value
    if isinstance(value, float):
        return Decimal(repr(value))
    if isinstance(value, int):
        return Decimal(value)
    return value


class Prospect(BaseModel):
    """A simple prospect: win (or lose) `outcome` with `probability`, else nothing."""
    outcome: Decimal = Field(..., description="Signed money amount, nonzero")
    probability: Decimal = Field(..., description="Probability in (0, 1]")

    model_config = FROZEN

    @field_validator("outcome", "probability", mode="before")
    @classmethod
    def _coerce(cls, value: Any) -> Any:
        return _as_decimal(value)

    @field_validator("outcome")
    @classmethod
    def _nonzero(cls, value: Decimal) -> Decimal:
        if value == 0:
            raise ValueError("outcome must be nonzero; zero is the implicit complement")
        return value

    @field_validator("probability")
    @classmethod
    def _probability_range(cls, value: Decimal) -> Decimal:
        if not (0 < value <= 1):
            raise ValueError(f"probability must be in (0, 1], got {value}")
        return value


class BinaryProblem(BaseModel):
    """
    A canonicalized binary choice problem.

    (x0, p0) is always the prospect with the smaller absolute outcome and the
    larger probability, (x1, p1) the other one. In gains (x0, p0) is the
    default and (x1, p1) the bold prospect; in losses the roles are swapped.

    Attributes:
        id: Opaque problem identifier
        x0: Signed outcome with the smaller absolute value
        p0: Probability of x0 (the larger probability)
        x1: Signed outcome with the larger absolute value
        p1: Probability of x1 (the smaller probability)
        domain: "gain" or "loss"
        default_role: Which prospect is the default ("P0" or "P1")
        bold_role: Which prospect is the bold one
    """
    id: str
    x0: Decimal
    p0: Decimal
    x1: Decimal
    p1: Decimal
    domain: Domain
    default_role: Role
    bold_role: Role

    model_config = FROZEN

    @field_validator("id", mode="before")
    @classmethod
    def _id_as_text(cls, value: Any) -> Any:
        return str(value) if isinstance(value, (int, Decimal)) else value

    @field_validator("x0", "p0", "x1", "p1", mode="before")
    @classmethod
    def _coerce(cls, value: Any) -> Any:
        return _as_decimal(value)

    @model_validator(mode="after")
    def _check_invariants(self) -> "BinaryProblem":
        if not (0 < self.p1 < self.p0 <= 1):
            raise ValueError("probabilities must satisfy 0 < p1 < p0 <= 1")
        if self.domain == "gain":
            if not (0 < self.x0 < self.x1):
                raise ValueError("gain problems require 0 < x0 < x1")
            expected = ("P0", "P1")
        else:
            if not (self.x1 < self.x0 < 0):
                raise ValueError("loss problems require x1 < x0 < 0")
            expected = ("P1", "P0")
        if (self.default_role, self.bold_role) != expected:
            raise ValueError(f"{self.domain} problems require default={expected[0]}, bold={expected[1]}")
        return self

    def prospect(self, role: Role) -> Prospect:
        if role == "P0":
            return Prospect(outcome=self.x0, probability=self.p0)
        return Prospect(outcome=self.x1, probability=self.p1)

    @property
    def default_prospect(self) -> Prospect:
        return self.prospect(self.default_role)

    @property
    def bold_prospect(self) -> Prospect:
        return self.prospect(self.bold_role)

    def magnitudes(self) -> Tuple[float, float, float, float]:
        """(|x0|, p0, |x1|, p1) as floats, the inputs of the challenge index."""
        return float(abs(self.x0)), float(self.p0), float(abs(self.x1)), float(self.p1)


class RespondentRecord(BaseModel):
    """One respondent's answers and background attributes."""
    respondent_id: str
    choices: Dict[str, Choice] = Field(default_factory=dict, description="problem id -> default/bold")
    gender: Optional[Gender] = Field(None, description="Self-reported gender, if given")
    hourly_pay: Optional[Decimal] = Field(None, ge=0, description="Hourly pay in the recent job, if given")

    model_config = FROZEN

    @field_validator("respondent_id", mode="before")
    @classmethod
    def _id_as_text(cls, value: Any) -> Any:
        return str(value) if isinstance(value, (int, Decimal)) else value

    @field_validator("hourly_pay", mode="before")
    @classmethod
    def _coerce(cls, value: Any) -> Any:
        return _as_decimal(value)


class ChoiceDataset(BaseModel):
    """Problems plus the respondent x problem choice matrix."""
    problems: List[BinaryProblem]
    respondents: List[RespondentRecord] = Field(default_factory=list)

    model_config = FROZEN

    @model_validator(mode="after")
    def _check_ids(self) -> "ChoiceDataset":
        problem_ids = [p.id for p in self.problems]
        if len(set(problem_ids)) != len(problem_ids):
            raise ValueError("problem ids must be unique")
        respondent_ids = [r.respondent_id for r in self.respondents]
        if len(set(respondent_ids)) != len(respondent_ids):
            raise ValueError("respondent ids must be unique")
        known = set(problem_ids)
        for respondent in self.respondents:
            unknown = set(respondent.choices) - known
            if unknown:
                raise ValueError(f"respondent {respondent.respondent_id} answers unknown problems {sorted(unknown)}")
        return self

    @property
    def respondent_ids(self) -> List[str]:
        return [r.respondent_id for r in self.respondents]

    def problems_in(self, domain: DomainFilter = "all") -> List[BinaryProblem]:
        if domain == "all":
            return list(self.problems)
        return [p for p in self.problems if p.domain == domain]

    def subset(self, respondent_ids: List[str]) -> "ChoiceDataset":
        """Same problems, only the given respondents (in dataset order)."""
        keep = set(respondent_ids)
        return ChoiceDataset(problems=self.problems,
                             respondents=[r for r in self.respondents if r.respondent_id in keep])

    @property
    def n_cells(self) -> int:
        return sum(len(r.choices) for r in self.respondents)


class ParamSet(BaseModel):
    """
    Value-function exponents and weighting-function parameters of the challenge index.

    All six parameters are always stored; the tying scheme states which of
    them are constrained to be equal. The one-parameter weighting form ignores
    the elevations and the identity form ignores everything (a0 = a1 = 1).
    """
    a0: float = Field(1.0, gt=0, le=PARAMETER_LIMITS["a"], description="Exponent for |x0|")
    a1: float = Field(1.0, gt=0, le=PARAMETER_LIMITS["a"], description="Exponent for |x1|")
    gamma0: float = Field(1.0, gt=0, le=PARAMETER_LIMITS["gamma"], description="Curvature of w0")
    gamma1: float = Field(1.0, gt=0, le=PARAMETER_LIMITS["gamma"], description="Curvature of w1")
    delta0: float = Field(1.0, gt=0, le=PARAMETER_LIMITS["delta"], description="Elevation of w0")
    delta1: float = Field(1.0, gt=0, le=PARAMETER_LIMITS["delta"], description="Elevation of w1")
    tying: Tying = Field("four", description="three: a, gamma, delta tied; four: gamma, delta tied; six: free")
    weighting_form: WeightingForm = Field("gw", description="gw, tk92 or identity")

    model_config = FROZEN

    @model_validator(mode="before")
    @classmethod
    def _neutralize_unused(cls, data: Any) -> Any:
        if not isinstance(data, dict):
            return data
        form = data.get("weighting_form", "gw")
        if form == "identity":
            data = {**data, "a0": 1.0, "a1": 1.0, "gamma0": 1.0, "gamma1": 1.0, "delta0": 1.0, "delta1": 1.0}
        elif form == "tk92":
            data = {**data, "delta0": 1.0, "delta1": 1.0}
        return data

    @model_validator(mode="after")
    def _check_tying(self) -> "ParamSet":
        if self.tying == "three" and self.a0 != self.a1:
            raise ValueError("three-parameter tying requires a0 == a1")
        if self.tying in ("three", "four"):
            if self.gamma0 != self.gamma1 or self.delta0 != self.delta1:
                raise ValueError(f"{self.tying}-parameter tying requires gamma0 == gamma1 and delta0 == delta1")
        if self.weighting_form == "tk92" and min(self.gamma0, self.gamma1) < TK92_GAMMA_MIN:
            raise ValueError(f"tk92 weighting requires gamma >= {TK92_GAMMA_MIN}")
        return self

    @classmethod
    def four_param(cls, a0: float, a1: float, gamma: float, delta: float,
                   weighting_form: WeightingForm = "gw") -> "ParamSet":
        """The a0, a1, gamma, delta layout used throughout the published tables."""
        return cls(a0=a0, a1=a1, gamma0=gamma, gamma1=gamma, delta0=delta, delta1=delta,
                   tying="four", weighting_form=weighting_form)

    @staticmethod
    def free_names(tying: Tying, weighting_form: WeightingForm) -> Tuple[str, ...]:
        if weighting_form == "identity":
            return ()
        names = {
            "three": ("a", "gamma", "delta"),
            "four": ("a0", "a1", "gamma", "delta"),
            "six": ("a0", "a1", "gamma0", "gamma1", "delta0", "delta1"),
        }[tying]
        if weighting_form == "tk92":
            names = tuple(n for n in names if not n.startswith("delta"))
        return names

    @classmethod
    def from_free(cls, values: Any, tying: Tying, weighting_form: WeightingForm) -> "ParamSet":
        names = cls.free_names(tying, weighting_form)
        values = [float(v) for v in values]
        if len(values) != len(names):
            raise ValueError(f"expected {len(names)} free values for {tying}/{weighting_form}, got {len(values)}")
        fields: Dict[str, Any] = {"tying": tying, "weighting_form": weighting_form}
        for name, value in zip(names, values):
            if name in ("a", "gamma", "delta"):
                fields[f"{name}0"] = value
                fields[f"{name}1"] = value
            else:
                fields[name] = value
        return cls(**fields)

    def free_values(self) -> Tuple[float, ...]:
        out = []
        for name in self.free_names(self.tying, self.weighting_form):
            out.append(getattr(self, f"{name}0" if name in ("a", "gamma", "delta") else name))
        return tuple(out)

    @property
    def n_free(self) -> int:
        return len(self.free_names(self.tying, self.weighting_form))

    def as_tuple(self) -> Tuple[float, float, float, float, float, float]:
        return self.a0, self.a1, self.gamma0, self.gamma1, self.delta0, self.delta1

    def retie(self, tying: Tying) -> "ParamSet":
        """The same parameter values under another tying scheme (validated)."""
        return ParamSet(**{**self.model_dump(), "tying": tying})


class SearchConfig(BaseModel):
    """Multi-start simplex search settings."""
    starts: int = Field(32, ge=0, description="Latin-hypercube starts (neutral and warm starts are extra)")
    seed: int = Field(0, description="Seed for the start grid")
    max_evaluations: int = Field(2000, ge=1, description="Objective evaluations per start")
    tolerance: float = Field(1e-9, gt=0, description="Simplex size / value tolerance")
    jobs: int = Field(1, ge=1, description="Starts evaluated concurrently")
    bounds: Dict[ParameterFamily, Tuple[float, float]] = Field(
        default_factory=lambda: {"a": (0.01, 5.0), "gamma": (0.05, 3.0), "delta": (0.01, 10.0)},
        description="Search box per parameter family")
    penalty: float = Field(10.0, gt=1, description="Objective value of rejected candidates")

    model_config = FROZEN

    @field_validator("bounds", mode="before")
    @classmethod
    def _merge_defaults(cls, value: Any) -> Any:
        if isinstance(value, dict):
            merged: Dict[str, Any] = {"a": (0.01, 5.0), "gamma": (0.05, 3.0), "delta": (0.01, 10.0)}
            merged.update(value)
            return merged
        return value

    @field_validator("bounds")
    @classmethod
    def _check_bounds(cls, value: Dict[str, Tuple[float, float]]) -> Dict[str, Tuple[float, float]]:
        for family, (low, high) in value.items():
            if not (0 < low < high <= PARAMETER_LIMITS[family]):
                raise ValueError(f"bounds for {family} must satisfy 0 < low < high <= {PARAMETER_LIMITS[family]}")
        return value

    def box(self, name: str, weighting_form: WeightingForm) -> Tuple[float, float]:
        """Search interval for a free-parameter name such as 'a0' or 'gamma'."""
        family = name.rstrip("01")
        low, high = self.bounds[family]  # type: ignore[index]
        if family == "gamma" and weighting_form == "tk92":
            low = max(low, TK92_GAMMA_MIN)
        return low, high


class CorrelationReport(BaseModel):
    """Pearson r with its confidence interval."""
    r: float = Field(..., ge=-1, le=1)
    n: int = Field(..., ge=1, description="Number of problems")
    ci_low: float
    ci_high: float
    level: float = Field(0.95, gt=0, lt=1)

    model_config = FROZEN

    @model_validator(mode="after")
    def _check_order(self) -> "CorrelationReport":
        if not (-1 <= self.ci_low <= self.r <= self.ci_high <= 1):
            raise ValueError("confidence bounds must bracket r inside [-1, 1]")
        return self


class ProblemObservation(BaseModel):
    """A problem with the observed proportion of bold choices."""
    problem: BinaryProblem
    p_bold: float = Field(..., ge=0, le=1, description="Proportion choosing the bold prospect")
    n_respondents: int = Field(..., ge=1, description="Respondents who answered the problem")

    model_config = FROZEN


class FitResult(BaseModel):
    """Optimized parameters and the correlation they achieve."""
    params: ParamSet
    r: float = Field(..., description="pearson_r(ci_values, p_bold)")
    correlation_report: CorrelationReport
    problem_ids: List[str]
    ci_values: List[float]
    p_bold: List[float]
    objective_evaluations: int = Field(0, ge=0)
    starts: int = Field(0, ge=0, description="Optimizer starts actually run")
    converged: bool = True
    seed: int = 0

    model_config = FROZEN


class ComparisonRow(BaseModel):
    """One model variant in a comparison table."""
    tying: Tying
    weighting_form: WeightingForm
    n_free: int
    r: float
    params: ParamSet
    fit: FitResult

    model_config = FROZEN

    @property
    def variant(self) -> str:
        if self.weighting_form == "identity":
            return "identity"
        return f"{self.weighting_form}/{self.tying}"


class CrossValFold(BaseModel):
    fold: int
    label: str = Field(..., description="e.g. 'A => B': training => testing subsample")
    train_ids: List[str]
    test_ids: List[str]
    train_fit: FitResult
    test_r: float

    model_config = FROZEN


class CrossValReport(BaseModel):
    """Respondent-level k-fold cross-validation of the challenge index fit."""
    domain: DomainFilter
    k: int
    seed: int
    tying: Tying
    weighting_form: WeightingForm
    folds: List[CrossValFold]
    train_r_mean: float
    test_r_mean: float
    param_means: Dict[str, float]

    model_config = FROZEN

    @model_validator(mode="after")
    def _check_folds(self) -> "CrossValReport":
        for fold in self.folds:
            if set(fold.train_ids) & set(fold.test_ids):
                raise ValueError(f"fold {fold.fold}: training and testing respondents overlap")
        return self


class EffectItem(BaseModel):
    """Input of an effects report: one problem or a pair, with observed bold rates."""
    label: str
    problems: List[BinaryProblem] = Field(..., min_length=1, max_length=2)
    p_bold_observed: List[Optional[float]] = Field(default_factory=list)

    model_config = FROZEN


class EffectRow(BaseModel):
    label: str
    problems: List[BinaryProblem]
    p_bold_observed: List[Optional[float]]
    ci_values: List[float]
    ci_times_100: List[float]
    delta_ci_times_100: Optional[float] = Field(None, description="(CI+ - CI-)*100 for gain/loss mirror pairs")

    model_config = FROZEN


class SubgroupRow(BaseModel):
    domain: Domain
    split_label: SubgroupAttribute
    group_a: str
    group_b: str
    n_a: int
    n_b: int
    prop_a: float = Field(..., ge=0, le=1)
    prop_b: float = Field(..., ge=0, le=1)
    difference: float
    z: float
    p_value: float

    model_config = FROZEN


class BoldPlayerSummary(BaseModel):
    """Who is a bold player in one domain, plus the attributes needed for subgroup tests."""
    domain: Domain
    threshold: float = Field(..., description="Mean bold-choice count over respondents")
    counts: Dict[str, int]
    per_respondent: Dict[str, bool]
    genders: Dict[str, Optional[Gender]] = Field(default_factory=dict)
    hourly_pay: Dict[str, Optional[Decimal]] = Field(default_factory=dict)
    subgroup_rows: List[SubgroupRow] = Field(default_factory=list)

    model_config = FROZEN


class ProblemFileRow(BaseModel):
    """A problem as presented to respondents: prospect A and prospect B."""
    id: str
    x_a: Decimal
    p_a: Decimal
    x_b: Decimal
    p_b: Decimal

    model_config = FROZEN

    @field_validator("id", mode="before")
    @classmethod
    def _id_as_text(cls, value: Any) -> Any:
        return str(value) if isinstance(value, (int, Decimal)) else value

    @field_validator("x_a", "p_a", "x_b", "p_b", mode="before")
    @classmethod
    def _coerce(cls, value: Any) -> Any:
        return _as_decimal(value)

    @property
    def prospect_a(self) -> Prospect:
        return Prospect(outcome=self.x_a, probability=self.p_a)

    @property
    def prospect_b(self) -> Prospect:
        return Prospect(outcome=self.x_b, probability=self.p_b)


class ResponseFileRow(BaseModel):
    respondent_id: str
    problem_id: str
    choice: PresentedLabel
    gender: Optional[str] = None
    hourly_pay: Optional[Decimal] = Field(None, ge=0)

    model_config = FROZEN

    @field_validator("respondent_id", "problem_id", mode="before")
    @classmethod
    def _id_as_text(cls, value: Any) -> Any:
        return str(value) if isinstance(value, (int, Decimal)) else value

    @field_validator("hourly_pay", mode="before")
    @classmethod
    def _coerce(cls, value: Any) -> Any:
        if value == "":
            return None
        return _as_decimal(value)


class ReferenceCorrelation(BaseModel):
    """A published correlation with its printed confidence interval."""
    r: float
    n: int
    ci_low: float
    ci_high: float
    tolerance: float = Field(0.001, description="Allowed deviation of recomputed bounds")
    n_printed: Optional[int] = Field(None, description="Sample size as printed, when it differs from n")
    source: str = ""
    note: Optional[str] = None

    model_config = FROZEN


class ReferenceEffect(BaseModel):
    """A published effect row: problems by id, observed % bold and printed CI x 100."""
    label: str
    problem_ids: List[str] = Field(..., min_length=1, max_length=2)
    percent_bold: List[float] = Field(default_factory=list)
    ci_x100_printed: List[float] = Field(default_factory=list)
    delta_ci_x100_printed: Optional[float] = None

    model_config = FROZEN


class Fixtures(BaseModel):
    """Published reference values bundled with the package."""
    version: str
    params: Dict[str, ParamSet]
    param_sources: Dict[str, str] = Field(default_factory=dict)
    correlations: Dict[str, ReferenceCorrelation]
    problem_rows: List[ProblemFileRow]
    problems: Dict[str, BinaryProblem]
    mirror_pairs: List[ReferenceEffect]
    effects: List[ReferenceEffect]
    examples: List[str]
    discrepancies: List[Dict[str, Any]] = Field(default_factory=list)
    crossval: Dict[Domain, List[Dict[str, Any]]] = Field(default_factory=dict)
    model_comparison: Dict[Domain, Dict[str, float]] = Field(default_factory=dict)
    bold_players: Dict[str, Any] = Field(default_factory=dict)
    synthetic_gain_problems: List[ProblemFileRow] = Field(default_factory=list)

    model_config = FROZEN

    def effect_items(self, which: EffectTable) -> List[EffectItem]:
        """EffectItems for one of the reference effect tables (table5 and table4 name them too)."""
        which = EFFECT_TABLE_ALIASES.get(which, which)
        if which not in ("mirror_pairs", "effects"):
            raise ValueError(f"unknown effect table {which!r}")
        return [
            EffectItem(label=entry.label,
                       problems=[self.problems[pid] for pid in entry.problem_ids],
                       p_bold_observed=[value / 100.0 for value in entry.percent_bold])
            for entry in getattr(self, which)
        ]

    def example_problems(self) -> List[BinaryProblem]:
        return [self.problems[pid] for pid in self.examples]
