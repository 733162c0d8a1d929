from __future__ import annotations

import numpy as np
import pytest
from hypothesis import settings
from scipy.spatial.transform import Rotation

from ropelength.knot import PolyKnot

settings.register_profile("default", deadline=None, max_examples=25)
settings.load_profile("default")


def random_unknot(rng: np.random.Generator, n: int = 24, amplitude: float = 0.15) -> PolyKnot:
    """A circle with a few random smooth Fourier modes in all three coordinates."""
    t = 2 * np.pi * np.arange(n) / n
    X = np.column_stack([np.cos(t), np.sin(t), np.zeros(n)])
    for k in (2, 3):
        a, b = rng.normal(scale=amplitude / k, size=(2, 3))
        X += np.outer(np.cos(k * t), a) + np.outer(np.sin(k * t), b)
    return PolyKnot(X)


def random_rigid(rng: np.random.Generator):
    R = Rotation.random(random_state=rng).as_matrix()
    return R, rng.normal(size=3)


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


def pytest_terminal_summary(terminalreporter):
    try:
        from test_acceptance import RESULTS
    except ImportError:
        return
    if RESULTS:
        terminalreporter.section("acceptance criteria")
        for k in sorted(RESULTS):
            terminalreporter.write_line(RESULTS[k])
