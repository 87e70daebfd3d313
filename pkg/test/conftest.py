"""Pytest configuration and shared fixtures."""

import sys
from pathlib import Path

import pytest

# Add src to sys.path so tests can import exotic_orbits
src_path = Path(__file__).parent.parent / "src"
sys.path.insert(0, str(src_path))

from exotic_orbits.utils import make_rng  # noqa: E402


@pytest.fixture
def rng():
    """Fresh deterministic generator per test."""
    return make_rng(20240601)
