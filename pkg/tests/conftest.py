from pathlib import Path

import numpy as np
import pytest
from hypothesis import strategies as st

from attackhmm import validate_model

FIXTURES = Path(__file__).parent / "fixtures"

_criteria = []


def pytest_runtest_logreport(report):
    if report.when != "call" and not (report.when == "setup" and report.failed):
        return
    label = getattr(report, "criterion", None)
    if label:
        _criteria.append((label, report.outcome))


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    marker = item.get_closest_marker("criterion")
    if marker:
        outcome.get_result().criterion = marker.args[0]


def pytest_terminal_summary(terminalreporter):
    if not _criteria:
        return
    terminalreporter.section("acceptance criteria")
    for label, outcome in _criteria:
        terminalreporter.write_line(f"{'PASS' if outcome == 'passed' else 'FAIL'}  {label}")


@pytest.fixture
def fixtures_dir():
    return FIXTURES


def random_model(rng, n, m, sparse=False):
    """Row-stochastic model with ``n`` states and ``m`` symbols.

    ``sparse`` draws small integer weights so that zeros and exact ties are
    common.
    """

    def rows(r, c):
        if sparse:
            w = rng.integers(0, 3, size=(r, c)).astype(float)
        else:
            w = rng.random((r, c))
        w[w.sum(axis=1) == 0] = 1.0
        return w / w.sum(axis=1, keepdims=True)

    return validate_model({
        "transition": rows(n, n),
        "emission": rows(n, m),
        "initial": rows(1, n)[0],
    })


@st.composite
def model_and_obs(draw, max_states=5, max_symbols=4, max_len=6):
    n = draw(st.integers(1, max_states))
    m = draw(st.integers(1, max_symbols))
    t = draw(st.integers(1, max_len))
    seed = draw(st.integers(0, 2**32 - 1))
    sparse = draw(st.booleans())
    rng = np.random.default_rng(seed)
    model = random_model(rng, n, m, sparse=sparse)
    obs = [int(x) for x in rng.integers(0, m, size=t)]
    return model, obs
