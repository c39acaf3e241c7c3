"""Shared fixtures.

Makes ``src/`` importable without an install and pins the sampling pool to a
fixed size so runs are comparable across machines.
"""

import math
import os
import sys
import tempfile

import pytest

SRC_DIR = os.path.join(os.path.dirname(os.path.dirname(os.path.abspath(__file__))), "src")
if SRC_DIR not in sys.path:
    sys.path.insert(0, SRC_DIR)

os.environ.setdefault("ZPD_THREADS", "2")

from zpd.domain.models import ModelParams  # noqa: E402


@pytest.fixture
def default_params():
    """sigma_x=0.7, sigma_y=1.5, mu=0.5 e^{j pi/6}, L=1."""
    return ModelParams(sigma_x=0.7, sigma_y=1.5, mu_abs=0.5, epsilon=math.pi / 6.0, big_l=1)


@pytest.fixture
def default_params_l5(default_params):
    return default_params.with_order(5)


@pytest.fixture
def uncorrelated_params():
    return ModelParams(sigma_x=1.0, sigma_y=1.0, mu_abs=0.0, epsilon=0.0, big_l=1)


@pytest.fixture
def temp_dir():
    """Create a temporary directory for file output."""
    with tempfile.TemporaryDirectory() as tmpdir:
        yield tmpdir
