import json
import math
import os
import tempfile

import pytest


@pytest.fixture
def temp_dir():
    """Create a temporary directory for test files"""
    with tempfile.TemporaryDirectory() as tmp_dir:
        yield tmp_dir


@pytest.fixture
def bubble_params():
    """n=4 critical Lane-Emden equation solved by 2√2/(1+r²)"""
    return {"n": 4, "mu": 0.0, "a": 1.0, "b": 0.0, "p": 2.0, "q": 1.0, "kappa": 0.0, "R": 2.0}


@pytest.fixture
def sample_config(temp_dir, bubble_params):
    """Sample configuration for testing"""
    return {
        "command": "solve",
        "params": dict(bubble_params),
        "solver": {"v0": 2.0 * math.sqrt(2.0), "R_max": 5.0},
        "output": {"dir": os.path.join(temp_dir, "out"), "formats": ["csv", "json"]},
    }


@pytest.fixture
def write_config(temp_dir):
    """Write a configuration dictionary to a JSON file and return its path"""
    def _write(config, name="lichlab.json"):
        path = os.path.join(temp_dir, name)
        with open(path, "w") as f:
            json.dump(config, f)
        return path
    return _write
