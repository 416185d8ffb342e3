"""
Pytest Configuration and Shared Fixtures
"""

import os
import sys
from pathlib import Path

# Override settings for testing BEFORE importing anything
os.environ["WAVESPEC_ENVIRONMENT"] = "testing"
os.environ["WAVESPEC_LOG_LEVEL"] = "WARNING"
os.environ.setdefault("WAVESPEC_WORKERS", "1")

import numpy as np
import pytest

# Add parent directory to path for imports
sys.path.insert(0, str(Path(__file__).parent.parent))

from wavespec.config import get_settings
from wavespec.schemas import ArmaNoiseParams, SolverOptions
from wavespec.services.wavelet_service import build_basis


@pytest.fixture(autouse=True)
def fresh_settings():
    """Each test sees settings rebuilt from the environment"""
    get_settings.cache_clear()
    yield
    get_settings.cache_clear()


@pytest.fixture
def rng():
    """Seeded generator for test inputs"""
    return np.random.default_rng(20240611)


@pytest.fixture
def haar_basis():
    return build_basis("haar", 10)


@pytest.fixture
def symmlet_basis():
    return build_basis("symmlet8", 10)


@pytest.fixture
def two_peak_model():
    return ArmaNoiseParams.two_peak_model()


@pytest.fixture
def white_noise():
    return ArmaNoiseParams.white_noise()


@pytest.fixture
def quick_solver():
    """Solver budget small enough for the default (non-slow) suite"""
    return SolverOptions(max_iters=2000)


@pytest.fixture
def out_dir(tmp_path):
    path = tmp_path / "run"
    path.mkdir()
    return path
