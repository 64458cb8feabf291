import json
from decimal import Decimal
import pytest
from challengetheory.exceptions import (
    DominanceError, DuplicateCellError, DuplicateIdError, MixedSignError, ParseError, UnknownAttributeError,
    UnknownProblemIdError,
)
from challengetheory.samples import fixture_params, synthetic_gain_problems
from challengetheory.synthetic import planted_dataset
from challengetheory.utils import (
    load_problem_rows, load_problems, load_responses, render_report, write_problems, write_responses,
)

PROBLEMS_CSV = """id,x_a,p_a,x_b,p_b
1,4000,0.8,3000,1
2,-3000,1,-4000,0.8
3,200,0.8,300,0.6
"""


@pytest.fixture
def problems_file(tmp_path):
    path = tmp_path / "problems.csv"
    path.write_text(PROBLEMS_CSV)
    return path


def _write(tmp_path, name, text):
    path = tmp_path / name
    path.write_text(text)
    return path


class TestLoadProblems:
    def test_canonical_order_and_roles(self, problems_file):
        problems = load_problems(problems_file)
        assert [p.id for p in problems] == ["1", "2", "3"]
        first = problems[0]
        assert (first.x0, first.p0, first.x1, first.p1) == (Decimal("3000"), Decimal("1"), Decimal("4000"), Decimal("0.8"))
        assert first.domain == "gain"
        assert problems[1].domain == "loss"
        assert problems[1].default_role == "P1"

    def test_json_input(self, tmp_path):
        records = [{"id": "g", "x_a": 100, "p_a": 1, "x_b": 250, "p_b": 0.3}]
        path = _write(tmp_path, "problems.json", json.dumps({"problems": records}))
        problem = load_problems(path)[0]
        assert problem.p1 == Decimal("0.3")

    @pytest.mark.parametrize("text, row", [
        ("id,x_a,p_a,x_b,p_b\n1,100,1.3,200,0.5\n", 2),
        ("id,x_a,p_a,x_b,p_b\n1,100,1,200,0.5\n2,abc,1,200,0.5\n", 3),
        ("id,x_a,p_a,x_b,p_b\n1,100,1,200\n", 2),
    ])
    def test_malformed_rows(self, tmp_path, text, row):
        with pytest.raises(ParseError) as info:
            load_problems(_write(tmp_path, "bad.csv", text))
        assert info.value.row == row

    def test_missing_column_and_empty_file(self, tmp_path):
        with pytest.raises(ParseError):
            load_problems(_write(tmp_path, "cols.csv", "id,x_a,p_a,x_b\n1,1,1,2\n"))
        with pytest.raises(ParseError):
            load_problems(_write(tmp_path, "empty.csv", ""))
        with pytest.raises(ParseError):
            load_problems(tmp_path / "missing.csv")

    def test_duplicate_id_names_both_rows(self, tmp_path):
        text = "id,x_a,p_a,x_b,p_b\n7,100,1,200,0.5\n7,100,1,300,0.5\n"
        with pytest.raises(DuplicateIdError, match="rows 2 and 3"):
            load_problems(_write(tmp_path, "dup.csv", text))

    def test_canonicalization_errors_carry_row(self, tmp_path):
        with pytest.raises(DominanceError, match="row 2"):
            load_problems(_write(tmp_path, "dom.csv", "id,x_a,p_a,x_b,p_b\n1,300,0.9,200,0.5\n"))
        with pytest.raises(MixedSignError):
            load_problems(_write(tmp_path, "mix.csv", "id,x_a,p_a,x_b,p_b\n1,100,0.9,-200,0.5\n"))


class TestLoadResponses:
    def test_labels_map_to_roles(self, tmp_path, problems_file):
        text = ("respondent_id,problem_id,choice,gender,hourly_pay\n"
                "r1,1,A,M,12.50\n"     # A is (4000, 0.8): bold
                "r1,2,A,,\n"            # A is (-3000, 1): bold in losses
                "r2,1,B,female,0\n"    # B is (3000, 1): default
                "r2,3,B,,\n")
        dataset = load_responses(_write(tmp_path, "responses.csv", text), load_problem_rows(problems_file))
        by_id = {r.respondent_id: r for r in dataset.respondents}
        assert by_id["r1"].choices == {"1": "bold", "2": "bold"}
        assert by_id["r2"].choices == {"1": "default", "3": "bold"}
        assert by_id["r1"].gender == "male"
        assert by_id["r1"].hourly_pay == Decimal("12.50")
        assert by_id["r2"].gender == "female"
        assert by_id["r2"].hourly_pay == Decimal("0")

    @pytest.mark.parametrize("body, error", [
        ("r1,9,A\n", UnknownProblemIdError),
        ("r1,1,A\nr1,1,B\n", DuplicateCellError),
        ("r1,1,A,x,\n", UnknownAttributeError),
        ("r1,1,A,m,\nr1,2,A,f,\n", UnknownAttributeError),
        ("r1,1,C\n", ParseError),
    ])
    def test_response_errors(self, tmp_path, problems_file, body, error):
        header = "respondent_id,problem_id,choice,gender,hourly_pay\n"
        path = _write(tmp_path, "responses.csv", header + body)
        with pytest.raises(error):
            load_responses(path, load_problem_rows(problems_file))


def test_written_files_load_back(tmp_path):
    dataset = planted_dataset(synthetic_gain_problems()[:6], fixture_params("params_gains"), n_respondents=20, seed=1)
    write_problems(dataset.problems, tmp_path / "p.csv")
    write_responses(dataset, tmp_path / "r.csv")
    loaded = load_responses(tmp_path / "r.csv", load_problem_rows(tmp_path / "p.csv"))
    assert loaded.problems == dataset.problems
    assert loaded.respondents == dataset.respondents


class TestRenderReport:
    ROWS = [{"id": "a", "ci": 0.0643243, "flag": True, "ids": ["x", "y"]},
            {"id": "b", "ci": 1 / 3, "note": None}]

    def test_csv_layout(self):
        text = render_report(self.ROWS, {"command": "ci", "seed": 0}, "csv", precision=3)
        assert text.splitlines() == [
            "# command: ci",
            "# seed: 0",
            "id,ci,flag,ids,note",
            "a,0.064,true,x;y,",
            "b,0.333,,,",
        ]

    def test_json_rounds_floats(self):
        document = json.loads(render_report(self.ROWS, {"command": "ci"}, "json", precision=2))
        assert document["metadata"] == {"command": "ci"}
        assert document["rows"][1]["ci"] == 0.33

    def test_stable(self):
        first = render_report(self.ROWS, {"command": "ci"}, "csv")
        assert first == render_report(self.ROWS, {"command": "ci"}, "csv")
