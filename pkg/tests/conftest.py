import sys
from pathlib import Path

import numpy as np
import pytest
from hypothesis import HealthCheck, settings
from hypothesis import strategies as st

from relcalc.corpus import random_relation

FIXTURES = Path(__file__).parent / "fixtures"

settings.register_profile(
    "relcalc", deadline=None, max_examples=60, suppress_health_check=[HealthCheck.too_slow]
)
settings.load_profile("relcalc")


@st.composite
def relations(draw, max_dim=6, field=None, kind=None, square=False):
    """Seeded random relation; hypothesis shrinks the seed and the dimensions."""
    seed = draw(st.integers(0, 2**32 - 1))
    n = draw(st.integers(1, max_dim))
    m = n if square else draw(st.integers(1, max_dim))
    f = field or draw(st.sampled_from(["real", "complex"]))
    return random_relation(np.random.default_rng(seed), n, m, f, kind)


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


@pytest.fixture
def fixtures_dir():
    return FIXTURES


def pytest_terminal_summary(terminalreporter):
    module = sys.modules.get("test_acceptance") or sys.modules.get("tests.test_acceptance")
    lines = getattr(module, "RESULTS", None)
    if lines:
        terminalreporter.section("acceptance criteria")
        for line in lines:
            terminalreporter.write_line(line)
