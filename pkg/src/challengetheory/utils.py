import csv
import io
import json
import logging
from decimal import Decimal
from pathlib import Path
from typing import Any, Dict, Iterable, List, Mapping, Optional, Sequence, Tuple, Union

from pydantic import ValidationError

from challengetheory.datamodels import (
    BinaryProblem, ChoiceDataset, Gender, OutputFormat, ProblemFileRow, RespondentRecord, ResponseFileRow,
)
from challengetheory.exceptions import (
    ChallengeTheoryError, DuplicateCellError, DuplicateIdError, ParseError, UnknownAttributeError,
    UnknownProblemIdError,
)
from challengetheory.model_problems import canonicalize_problem, choice_of, role_of

logger = logging.getLogger(__name__)

PathLike = Union[str, Path]

PROBLEM_COLUMNS = ("id", "x_a", "p_a", "x_b", "p_b")
RESPONSE_COLUMNS = ("respondent_id", "problem_id", "choice", "gender", "hourly_pay")
REQUIRED_RESPONSE_COLUMNS = RESPONSE_COLUMNS[:3]

GENDER_TOKENS: Dict[str, Gender] = {
    "m": "male", "male": "male",
    "f": "female", "female": "female",
    "o": "other", "other": "other",
}


def _infer_format(path: PathLike, format: Optional[OutputFormat]) -> OutputFormat:
    if format is not None:
        return format
    return "json" if Path(path).suffix.lower() == ".json" else "csv"


def _read_records(path: PathLike, format: Optional[OutputFormat],
                  required: Sequence[str]) -> List[Tuple[int, Dict[str, Any]]]:
    """(row number, record) pairs; CSV rows are numbered from the header line = 1."""
    source = str(path)
    try:
        text = Path(path).read_text(encoding="utf-8")
    except OSError as e:
        raise ParseError(f"cannot read file: {e}", path=source)
    if not text.strip():
        raise ParseError("file is empty", path=source)

    if _infer_format(path, format) == "json":
        try:
            data = json.loads(text, parse_float=Decimal)
        except json.JSONDecodeError as e:
            raise ParseError(f"invalid JSON: {e.msg}", path=source, row=e.lineno)
        if isinstance(data, dict):
            data = next((v for v in data.values() if isinstance(v, list)), None)
        if not isinstance(data, list) or not all(isinstance(item, dict) for item in data):
            raise ParseError("expected a list of objects", path=source)
        records = list(enumerate(data, start=1))
    else:
        reader = csv.DictReader(io.StringIO(text))
        header = reader.fieldnames or []
        missing = [column for column in required if column not in header]
        if missing:
            raise ParseError(f"header lacks columns {missing}", path=source, row=1)
        records = []
        for index, record in enumerate(reader, start=2):
            if None in record or any(record.get(column) is None for column in required):
                raise ParseError("wrong number of fields", path=source, row=index)
            records.append((index, {k: v.strip() for k, v in record.items() if isinstance(v, str)}))

    if not records:
        raise ParseError("file has no data rows", path=source)
    return records


def _first_error(error: ValidationError) -> str:
    detail = error.errors()[0]
    where = ".".join(str(part) for part in detail.get("loc", ()))
    return f"{where}: {detail.get('msg')}" if where else str(detail.get("msg"))


def _read_problems(path: PathLike, format: Optional[OutputFormat]) -> List[Tuple[ProblemFileRow, BinaryProblem]]:
    source = str(path)
    loaded: List[Tuple[ProblemFileRow, BinaryProblem]] = []
    seen: Dict[str, int] = {}
    for row_number, record in _read_records(path, format, PROBLEM_COLUMNS):
        try:
            row = ProblemFileRow(**{column: record.get(column) for column in PROBLEM_COLUMNS})
            a, b = row.prospect_a, row.prospect_b
        except ValidationError as e:
            raise ParseError(_first_error(e), path=source, row=row_number)
        if row.id in seen:
            raise DuplicateIdError(f"{source}: problem id {row.id!r} appears in rows {seen[row.id]} and {row_number}")
        seen[row.id] = row_number
        try:
            problem = canonicalize_problem(a, b, row.id)
        except ChallengeTheoryError as e:
            raise type(e)(f"{source} row {row_number}: {e}") from e
        loaded.append((row, problem))
    return loaded


def load_problem_rows(path: PathLike, format: Optional[OutputFormat] = None) -> List[ProblemFileRow]:
    """
    Read raw presented problems (prospect A and prospect B) from CSV or JSON.

    Every row is also canonicalized, so a row that cannot form a valid
    problem is rejected here with its row number.

    Args:
        path: File with columns id,x_a,p_a,x_b,p_b
        format: "csv" or "json"; inferred from the suffix when omitted

    Raises:
        ParseError: Unreadable file, missing columns, malformed values
        DuplicateIdError: Two rows share an id (both rows are named)
        MixedSignError, DominanceError, DegenerateTieError: From canonicalization
    """
    return [row for row, _ in _read_problems(path, format)]


def canonicalize_rows(rows: Sequence[ProblemFileRow], source: str = "problems") -> List[BinaryProblem]:
    """Canonical problems for raw rows, in order; errors name the offending problem."""
    problems = []
    for row in rows:
        try:
            problems.append(canonicalize_problem(row.prospect_a, row.prospect_b, row.id))
        except ChallengeTheoryError as e:
            raise type(e)(f"{source}: {e}") from e
    return problems


def load_problems(path: PathLike, format: Optional[OutputFormat] = None) -> List[BinaryProblem]:
    """
    Read and canonicalize problems, preserving row order.

    Raises:
        ParseError: Malformed rows (with row number)
        DuplicateIdError: Repeated problem id
        MixedSignError, DominanceError, DegenerateTieError: From canonicalization (with row number)
    """
    return [problem for _, problem in _read_problems(path, format)]


def _parse_gender(token: Optional[str], source: str, row: int) -> Optional[Gender]:
    if token is None or token == "":
        return None
    gender = GENDER_TOKENS.get(token.strip().lower())
    if gender is None:
        raise UnknownAttributeError(f"{source} row {row}: unknown gender token {token!r}")
    return gender


def load_responses(path: PathLike, problem_rows: Sequence[ProblemFileRow],
                   format: Optional[OutputFormat] = None) -> ChoiceDataset:
    """
    Read a long-format response file and build the choice dataset.

    Presented labels A and B are mapped to default/bold through each
    problem's canonical roles. Gender and hourly pay may appear on any row of
    a respondent; repeated values must agree.

    Args:
        path: File with columns respondent_id,problem_id,choice[,gender,hourly_pay]
        problem_rows: Raw problem rows as returned by load_problem_rows

    Raises:
        ParseError: Malformed rows
        UnknownProblemIdError: A response names a problem that was not loaded
        UnknownAttributeError: Unknown gender token or conflicting attributes
        DuplicateCellError: Two responses for the same respondent and problem
    """
    source = str(path)
    raw_by_id = {row.id: row for row in problem_rows}
    problems = canonicalize_rows(problem_rows)
    problem_by_id = {problem.id: problem for problem in problems}

    choices: Dict[str, Dict[str, str]] = {}
    genders: Dict[str, Optional[Gender]] = {}
    pay: Dict[str, Optional[Decimal]] = {}
    cells: Dict[Tuple[str, str], int] = {}

    for row_number, record in _read_records(path, format, REQUIRED_RESPONSE_COLUMNS):
        try:
            response = ResponseFileRow(**{column: record.get(column) for column in RESPONSE_COLUMNS
                                          if record.get(column) is not None})
        except ValidationError as e:
            raise ParseError(_first_error(e), path=source, row=row_number)

        key = (response.respondent_id, response.problem_id)
        if response.problem_id not in problem_by_id:
            raise UnknownProblemIdError(f"{source} row {row_number}: unknown problem id {response.problem_id!r}")
        if key in cells:
            raise DuplicateCellError(
                f"{source}: respondent {key[0]} answers problem {key[1]} in rows {cells[key]} and {row_number}")
        cells[key] = row_number

        raw = raw_by_id[response.problem_id]
        problem = problem_by_id[response.problem_id]
        presented = raw.prospect_a if response.choice == "A" else raw.prospect_b
        choices.setdefault(response.respondent_id, {})[response.problem_id] = choice_of(problem, role_of(problem, presented))

        gender = _parse_gender(response.gender, source, row_number)
        for store, value, name in ((genders, gender, "gender"), (pay, response.hourly_pay, "hourly_pay")):
            previous = store.get(response.respondent_id)
            if value is not None and previous is not None and previous != value:
                raise UnknownAttributeError(
                    f"{source} row {row_number}: conflicting {name} for respondent {response.respondent_id}")
            if previous is None:
                store[response.respondent_id] = value

    respondents = [
        RespondentRecord(respondent_id=rid, choices=answered, gender=genders.get(rid), hourly_pay=pay.get(rid))
        for rid, answered in choices.items()
    ]
    logger.info("loaded %d responses from %d respondents", len(cells), len(respondents))
    return ChoiceDataset(problems=problems, respondents=respondents)


def problem_to_row(problem: BinaryProblem) -> ProblemFileRow:
    """Presented form of a canonical problem: A = (x0, p0), B = (x1, p1)."""
    return ProblemFileRow(id=problem.id, x_a=problem.x0, p_a=problem.p0, x_b=problem.x1, p_b=problem.p1)


def _as_rows(problems: Iterable[Union[ProblemFileRow, BinaryProblem]]) -> List[ProblemFileRow]:
    return [p if isinstance(p, ProblemFileRow) else problem_to_row(p) for p in problems]


def _write(records: List[Dict[str, Any]], columns: Sequence[str], path: PathLike,
           format: Optional[OutputFormat]) -> None:
    if _infer_format(path, format) == "json":
        text = json.dumps(records, indent=2, default=str) + "\n"
    else:
        buffer = io.StringIO()
        writer = csv.DictWriter(buffer, fieldnames=list(columns), lineterminator="\n")
        writer.writeheader()
        writer.writerows({k: "" if v is None else str(v) for k, v in r.items()} for r in records)
        text = buffer.getvalue()
    Path(path).write_text(text, encoding="utf-8")


def write_problems(problems: Iterable[Union[ProblemFileRow, BinaryProblem]], path: PathLike,
                   format: Optional[OutputFormat] = None) -> None:
    """Write problems in the id,x_a,p_a,x_b,p_b layout that load_problem_rows reads."""
    records = [{column: getattr(row, column) for column in PROBLEM_COLUMNS} for row in _as_rows(problems)]
    _write(records, PROBLEM_COLUMNS, path, format)


def write_responses(dataset: ChoiceDataset, path: PathLike, format: Optional[OutputFormat] = None) -> None:
    """
    Write the dataset in long format, labelling (x0, p0) as A and (x1, p1) as B.

    Pair it with write_problems(dataset.problems, ...) so the labels agree.
    """
    problem_by_id = {problem.id: problem for problem in dataset.problems}
    records = []
    for respondent in dataset.respondents:
        for problem_id, choice in respondent.choices.items():
            problem = problem_by_id[problem_id]
            role = problem.bold_role if choice == "bold" else problem.default_role
            records.append({
                "respondent_id": respondent.respondent_id,
                "problem_id": problem_id,
                "choice": "A" if role == "P0" else "B",
                "gender": respondent.gender,
                "hourly_pay": respondent.hourly_pay,
            })
    _write(records, RESPONSE_COLUMNS, path, format)


def _format_value(value: Any, precision: int) -> Any:
    if isinstance(value, bool) or value is None:
        return value
    if isinstance(value, float):
        return round(value, precision) + 0.0
    if isinstance(value, Decimal):
        return str(value)
    if isinstance(value, (list, tuple)):
        return [_format_value(v, precision) for v in value]
    if isinstance(value, dict):
        return {k: _format_value(v, precision) for k, v in value.items()}
    return value


def _csv_cell(value: Any, precision: int) -> str:
    if value is None:
        return ""
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, float):
        return f"{value:.{precision}f}"
    if isinstance(value, (list, tuple)):
        return ";".join(_csv_cell(v, precision) for v in value)
    return str(value)


def render_report(rows: Sequence[Mapping[str, Any]], metadata: Mapping[str, Any],
                  format: OutputFormat = "csv", precision: int = 4) -> str:
    """
    Serialize report rows with a metadata block.

    CSV starts with one '# key: value' line per metadata entry, followed by a
    header made of the row keys in first-seen order. JSON is an object with
    'metadata' and 'rows'. Floats are rounded to `precision` decimals, so the
    output is byte-stable for identical inputs.
    """
    if format == "json":
        document = {"metadata": _format_value(dict(metadata), precision),
                    "rows": [_format_value(dict(row), precision) for row in rows]}
        return json.dumps(document, indent=2) + "\n"

    buffer = io.StringIO()
    for key, value in metadata.items():
        buffer.write(f"# {key}: {_csv_cell(value, precision)}\n")
    columns: List[str] = []
    for row in rows:
        columns.extend(key for key in row if key not in columns)
    writer = csv.writer(buffer, lineterminator="\n")
    if columns:
        writer.writerow(columns)
        for row in rows:
            writer.writerow([_csv_cell(row.get(column), precision) for column in columns])
    return buffer.getvalue()
