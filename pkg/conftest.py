"""
Shared fixtures for the test suite.
"""

from fractions import Fraction

import numpy as np
import pytest

from src.functions.bvfun import BVFunction, polyline


@pytest.fixture
def rng():
    return np.random.default_rng(20240917)


@pytest.fixture
def example_nodes():
    """a, b, c of the worked examples."""
    return Fraction(1, 5), Fraction(3, 5), Fraction(4, 5)


def _random_bv(rng: np.random.Generator, max_pieces: int = 4, max_jumps: int = 3) -> BVFunction:
    k = int(rng.integers(1, max_pieces + 1))
    inner = np.sort(rng.uniform(0.05, 0.95, size=k - 1))
    while inner.size > 1 and np.min(np.diff(inner)) < 1e-3:
        inner = np.sort(rng.uniform(0.05, 0.95, size=k - 1))
    breakpoints = (0.0, *inner.tolist(), 1.0)
    pieces = tuple(tuple(rng.uniform(-2.0, 2.0, size=int(rng.integers(1, 5))).tolist()) for _ in range(k))
    jumps = tuple((float(rng.uniform(0.02, 0.98)), float(rng.uniform(-1.0, 1.0)))
                  for _ in range(int(rng.integers(0, max_jumps + 1))))
    return BVFunction(breakpoints, pieces, jumps)


def _random_polyline(rng: np.random.Generator, vertices: int = 6) -> BVFunction:
    inner = np.sort(rng.uniform(0.02, 0.98, size=vertices - 2))
    while np.min(np.diff(inner)) < 0.02:
        inner = np.sort(rng.uniform(0.02, 0.98, size=vertices - 2))
    ts = [0.0, *inner.tolist(), 1.0]
    return polyline(list(zip(ts, rng.uniform(-1.0, 1.0, size=vertices).tolist())))


@pytest.fixture
def random_bv(rng):
    """Factory for random piecewise-cubic functions with a few jumps."""
    return lambda: _random_bv(rng)


@pytest.fixture
def random_polyline(rng):
    """Factory for random continuous piecewise-linear functions."""
    return lambda: _random_polyline(rng)
