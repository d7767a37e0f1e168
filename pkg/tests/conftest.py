"""
Shared fixtures and utilities for all tests.
"""
import os
import sys
import shutil
import tempfile
from pathlib import Path

import numpy as np
import pytest

# Add project root to Python path
project_root = Path(__file__).parent.parent
if str(project_root) not in sys.path:
    sys.path.insert(0, str(project_root))

# Tests log to stderr only
os.environ.setdefault("NC_LOG_FILE", "0")

from nc_concentration.model.models import MomentProfile
from nc_concentration.src.spectral.operators import HermitianMatrix, random_hermitian
from nc_concentration.utils.config_loader import reset_settings
from nc_concentration.utils.rng import named_stream


@pytest.fixture
def temp_dir():
    """Create a temporary directory for test files."""
    temp_path = tempfile.mkdtemp()
    yield Path(temp_path)
    shutil.rmtree(temp_path, ignore_errors=True)


@pytest.fixture
def rng():
    """Seeded generator independent of the trial streams."""
    return named_stream(12345, 0)


@pytest.fixture
def hermitian_factory(rng):
    """Random Hermitian matrices of a requested dimension."""
    def make(dim: int, scale: float = 1.0) -> HermitianMatrix:
        return random_hermitian(dim, rng, scale)
    return make


@pytest.fixture
def unit_profile():
    """Profile with S = R = 1."""
    return MomentProfile(S=1.0, R=1.0)


@pytest.fixture
def single_thread(monkeypatch):
    """Force the worker pool down to one thread."""
    monkeypatch.setenv("NC_THREADS", "1")
    reset_settings()
    yield
    reset_settings()


@pytest.fixture(autouse=True)
def reset_environment(monkeypatch):
    """Reset environment variables and cached settings before each test."""
    for key in ["NC_CONFIG_PATH", "NC_THREADS", "NC_DEBUG"]:
        monkeypatch.delenv(key, raising=False)
    monkeypatch.setenv("NC_LOG_FILE", "0")
    reset_settings()
    yield
    reset_settings()
