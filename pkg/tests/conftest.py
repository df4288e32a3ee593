"""Shared fixtures: the fixed example operators, seeded generators, fixture files."""

from pathlib import Path

import numpy as np
import pytest

from base_reports import OperatorFile
from operators import reset_solvers
from theorems import example_operators, four_point_operator, remark_operator

FIXTURES = Path(__file__).resolve().parent.parent / "fixtures"


@pytest.fixture(autouse=True)
def fresh_solvers():
    reset_solvers()
    yield
    reset_solvers()


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


@pytest.fixture
def example_ops():
    """(T, A1, A2) of the three-dimensional distance counterexample."""
    return example_operators()


@pytest.fixture
def remark_op():
    return remark_operator()


@pytest.fixture
def four_point_op():
    return four_point_operator()


@pytest.fixture
def fixture_path():
    def _path(name: str) -> Path:
        return FIXTURES / f"{name}.json"

    return _path


@pytest.fixture
def load_fixture(fixture_path):
    def _load(name: str):
        return OperatorFile.model_validate_json(fixture_path(name).read_text()).to_operator()

    return _load
