"""
Sample Data Module for challengetheory

Bundled reference values (published parameter sets, correlations, effect
tables) and small sample problem files for tests and demonstrations.
"""

import importlib.resources
import json
from functools import lru_cache
from pathlib import Path
from typing import Any, Dict, List

from challengetheory.datamodels import BinaryProblem, Fixtures, ParamSet, ProblemFileRow
from challengetheory.model_problems import canonicalize_problem

FIXTURES_FILENAME = "fixtures.json"

SAMPLE_FILES = {
    "examples": "sample_problems_examples.csv",
    "mirror_pairs": "sample_problems_mirror_pairs.csv",
    "synthetic": "sample_problems_synthetic.csv",
}


def _read_fixture_json() -> Dict[str, Any]:
    with importlib.resources.files('challengetheory.data').joinpath(FIXTURES_FILENAME).open('r', encoding='utf-8') as f:
        return json.load(f)


@lru_cache(maxsize=1)
def builtin_fixtures() -> Fixtures:
    """
    Published reference values, loaded once from the package data.

    Returns:
        Fixtures with parameter sets (params_gains, params_losses, params_all,
        params_kt), correlations with printed intervals, the canonicalized
        effect problems, the mirror-pair and effect tables, the
        cross-validation and model-comparison reference rows, bold-player
        reference values and the synthetic gain problem set

    Example:
        >>> builtin_fixtures().params["params_gains"].a0
        1.1936
    """
    raw = _read_fixture_json()
    params = {
        name: ParamSet.four_param(entry["a0"], entry["a1"], entry["gamma"], entry["delta"])
        for name, entry in raw["params"].items()
    }
    rows = [ProblemFileRow(**entry) for entry in raw["problems"]]
    problems = {row.id: canonicalize_problem(row.prospect_a, row.prospect_b, row.id) for row in rows}
    return Fixtures(
        version=raw["version"],
        params=params,
        param_sources={name: entry.get("source", "") for name, entry in raw["params"].items()},
        correlations=raw["correlations"],
        problem_rows=rows,
        problems=problems,
        mirror_pairs=raw["mirror_pairs"],
        effects=raw["effects"],
        examples=raw["examples"],
        discrepancies=raw.get("discrepancies", []),
        crossval=raw.get("crossval", {}),
        model_comparison=raw.get("model_comparison", {}),
        bold_players=raw.get("bold_players", {}),
        synthetic_gain_problems=[ProblemFileRow(**entry) for entry in raw.get("synthetic_gain_problems", [])],
    )


def fixture_params(name: str) -> ParamSet:
    """A bundled parameter set by name, e.g. 'params_gains'."""
    fixtures = builtin_fixtures()
    if name not in fixtures.params:
        raise ValueError(f"unknown parameter fixture {name!r}; choose from {sorted(fixtures.params)}")
    return fixtures.params[name]


def synthetic_gain_problems() -> List[BinaryProblem]:
    """The 22 canonicalized synthetic gain problems used for planted-model work."""
    return [canonicalize_problem(row.prospect_a, row.prospect_b, row.id)
            for row in builtin_fixtures().synthetic_gain_problems]


class SampleData:
    """
    Access to the sample problem files shipped with the package.

    Example:
        >>> path = SampleData.get_problems_path("examples")
        >>> path.name
        'sample_problems_examples.csv'
    """

    @staticmethod
    def list_available_samples() -> List[str]:
        return sorted(SAMPLE_FILES)

    @staticmethod
    def get_problems_path(name: str = "examples") -> Path:
        """
        Filesystem path of a bundled problems CSV.

        Raises:
            ValueError: If name is not a bundled sample
            FileNotFoundError: If the sample file cannot be found
        """
        if name not in SAMPLE_FILES:
            raise ValueError(f"sample must be one of {sorted(SAMPLE_FILES)}")
        resource = importlib.resources.files('challengetheory.sample_files').joinpath(SAMPLE_FILES[name])
        path = Path(str(resource))
        if not path.is_file():
            raise FileNotFoundError(f"Sample problems {name} not found")
        return path

    @staticmethod
    def get_problems_text(name: str = "examples") -> str:
        return SampleData.get_problems_path(name).read_text(encoding='utf-8')


def get_problems_path(name: str = "examples") -> Path:
    """Convenience wrapper for SampleData.get_problems_path."""
    return SampleData.get_problems_path(name)


def list_available_samples() -> List[str]:
    return SampleData.list_available_samples()
