"""
Shared fixtures: problem documents and a seeded generator
"""

import json

import numpy as np
import pytest

from factories import HYPERGEOMETRIC_VALUES, diagonal_class


@pytest.fixture
def rng():
    return np.random.default_rng(20240517)


@pytest.fixture
def hypergeometric_problem():
    return {
        "flavor": "additive",
        "n": 2,
        "classes": [diagonal_class(values) for values in HYPERGEOMETRIC_VALUES],
        "mode": "generic",
    }


@pytest.fixture
def alpha_failing_problem():
    """MVs (1,1,1,1), (2,2), (2,2): beta holds, alpha fails"""
    return {
        "flavor": "additive",
        "n": 4,
        "classes": [
            diagonal_class(["1", "2", "3", "4"]),
            diagonal_class(["1/2", "-3"], [2, 2]),
            diagonal_class(["-1", "-3/2"], [2, 2]),
        ],
        "mode": "generic",
    }


@pytest.fixture
def scalar_problem():
    return {
        "flavor": "additive",
        "n": 2,
        "classes": [
            diagonal_class(["1"], [2]),
            diagonal_class(["2"], [2]),
            diagonal_class(["-3"], [2]),
        ],
        "mode": "generic",
    }


@pytest.fixture
def write_json(tmp_path):
    def write(name, data):
        path = tmp_path / name
        path.write_text(json.dumps(data))
        return str(path)

    return write
