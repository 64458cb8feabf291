import json
import pytest
from challengetheory.cli import build_parser, main, parse_params
from challengetheory.samples import get_problems_path


def _metadata(text):
    pairs = (line[2:].split(": ", 1) for line in text.splitlines() if line.startswith("# "))
    return dict(pairs)


@pytest.fixture(scope="module")
def simulated(tmp_path_factory):
    folder = tmp_path_factory.mktemp("simulated")
    problems, responses = folder / "problems.csv", folder / "responses.csv"
    code = main(["simulate", "--problems-out", str(problems), "--responses-out", str(responses),
                 "--noise", "0.02", "--seed", "5"])
    assert code == 0
    return problems, responses


def test_reproduce_is_clean_and_stable(capsys):
    assert main(["reproduce"]) == 0
    first = capsys.readouterr().out
    assert main(["reproduce"]) == 0
    second = capsys.readouterr().out
    assert first == second
    assert _metadata(first)["failed"] == "0"
    assert "documented_discrepancy" in first
    assert "FAIL" not in first


def test_classify_sample(capsys):
    assert main(["classify", str(get_problems_path("examples"))]) == 0
    out = capsys.readouterr().out
    assert "example_gain,gain,200,0.8,300,0.6" in out
    assert "example_loss,loss,-300,0.6,-200,0.8" in out


def test_ci_json(capsys):
    assert main(["ci", str(get_problems_path("mirror_pairs")), "--params", "fixture:params_gains",
                 "--format", "json"]) == 0
    document = json.loads(capsys.readouterr().out)
    assert document["metadata"]["command"] == "ci"
    assert len(document["rows"]) == 10


def test_effects(capsys):
    assert main(["effects", "--format", "json"]) == 0
    rows = json.loads(capsys.readouterr().out)["rows"]
    assert [row["label"] for row in rows] == ["pair 1", "pair 2", "pair 3", "pair 4", "pair 5"]
    assert rows[0]["problems"] == ["la1_gain", "la1_loss"]
    assert rows[0]["delta_ci_x100"] == pytest.approx(3.36, abs=0.01)


def test_effects_published_table_names(capsys):
    assert main(["effects", "--fixtures", "table5", "--format", "json"]) == 0
    document = json.loads(capsys.readouterr().out)
    rows = document["rows"]
    assert len(rows) == 5
    assert all(row["delta_ci_x100"] > 0 for row in rows)
    assert document["metadata"]["fixtures"] == "table5"

    assert main(["effects", "--fixtures", "table4", "--format", "json"]) == 0
    aliased = json.loads(capsys.readouterr().out)["rows"]
    assert main(["effects", "--fixtures", "effects", "--format", "json"]) == 0
    assert aliased == json.loads(capsys.readouterr().out)["rows"]


@pytest.mark.parametrize("argv, code", [
    (["ci", "PROBLEMS"], 1),
    (["ci", "PROBLEMS", "--params", "fixture:nope"], 1),
    (["ci", "PROBLEMS", "--params", "1,2"], 1),
    (["ci", "PROBLEMS", "--weighting", "tk92", "--params", "1,1,0.7,0.7,2,2"], 1),
    (["ci", "PROBLEMS", "--weighting", "identity", "--params", "1,1,0.7"], 1),
    (["ci", "PROBLEMS", "--params", "fixture:params_gains", "--jobs", "0"], 1),
    (["ci", "PROBLEMS", "--params", "fixture:params_gains", "--starts", "-1"], 1),
    (["ci", "PROBLEMS", "--params", "fixture:params_gains", "--jobs", "two"], 1),
    (["ci", "missing.csv", "--params", "1,1,0.7,2"], 2),
    (["frobnicate"], 1),
    ([], 1),
])
def test_exit_codes(argv, code, capsys):
    path = str(get_problems_path("examples"))
    assert main([path if a == "PROBLEMS" else a for a in argv]) == code
    assert "Error" in capsys.readouterr().err


def test_ci_tk92_numeric_params(capsys):
    path = str(get_problems_path("examples"))
    assert main(["ci", path, "--weighting", "tk92", "--params", "1,1,0.7", "--format", "json"]) == 0
    rows = json.loads(capsys.readouterr().out)["rows"]
    assert len(rows) == 2


def test_validation_exit_code(tmp_path, capsys):
    path = tmp_path / "dominated.csv"
    path.write_text("id,x_a,p_a,x_b,p_b\n1,300,0.9,200,0.5\n")
    assert main(["classify", str(path)]) == 3
    assert "row 2" in capsys.readouterr().err
    empty = tmp_path / "empty.csv"
    empty.write_text("")
    assert main(["classify", str(empty)]) == 2


def test_fit_on_simulated_data(simulated, capsys):
    problems, responses = simulated
    assert main(["fit", str(problems), str(responses), "--starts", "4", "--seed", "1"]) == 0
    metadata = _metadata(capsys.readouterr().out)
    assert float(metadata["r"]) < -0.9
    assert metadata["tying"] == "four"


def test_cv_deterministic(simulated, capsys):
    problems, responses = simulated
    argv = ["cv", str(problems), str(responses), "--starts", "4", "--seed", "2", "--tying", "three"]
    assert main(argv) == 0
    first = capsys.readouterr().out
    assert main(argv) == 0
    assert capsys.readouterr().out == first
    assert "Average" in first


def test_subgroups_on_simulated_data(simulated, capsys):
    problems, responses = simulated
    assert main(["subgroups", str(problems), str(responses)]) == 0
    out = capsys.readouterr().out
    assert "gender" in out and "earnings" in out


def test_output_file(tmp_path):
    target = tmp_path / "report.csv"
    assert main(["effects", "--fixtures", "effects", "-o", str(target)]) == 0
    assert target.read_text().startswith("# command: effects")


def test_parse_params():
    assert parse_params("1.2,1.3,0.7,2.5", "gw").tying == "four"
    assert parse_params("1.2,0.7,2.5", "gw").tying == "three"
    tk92 = parse_params("1.2,1.3,0.7", "tk92")
    assert (tk92.tying, tk92.weighting_form) == ("four", "tk92")
    assert (tk92.a0, tk92.a1, tk92.gamma0, tk92.gamma1) == (1.2, 1.3, 0.7, 0.7)
    assert parse_params("1.2,0.7", "tk92").tying == "three"
    assert parse_params("1.2,1.3,0.7,0.8", "tk92").tying == "six"
    assert parse_params(None, "identity").weighting_form == "identity"
    assert parse_params(None, "gw") is None


def test_parser_defaults():
    args = build_parser().parse_args(["cv", "p.csv", "r.csv"])
    assert args.k == 2
    assert args.domain == "gain"
    assert args.seed is None
