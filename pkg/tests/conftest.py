import numpy as np
import pytest

from sighypergraph.timeseries import MultivariatePath, TimeGrid


@pytest.fixture
def rng():
    return np.random.default_rng(20241016)


@pytest.fixture
def grid101():
    return TimeGrid.uniform(100)


def walk(rng, n_samples=101, d=2, label=None, scale=0.1):
    """Gaussian random walk on the uniform grid over [0, 1]."""
    steps = rng.normal(scale=scale, size=(n_samples - 1, d))
    values = np.vstack([np.zeros((1, d)), np.cumsum(steps, axis=0)])
    return MultivariatePath(TimeGrid.uniform(n_samples - 1), values, label)


@pytest.fixture
def make_walk():
    return walk


# one PASS/FAIL line per acceptance criterion, keyed on test_c<N>_ names
_CRITERIA = {}


def pytest_configure(config):
    config.addinivalue_line("markers", "acceptance: exit-criterion checks")


def pytest_runtest_logreport(report):
    name = report.nodeid.rsplit("::", 1)[-1]
    if not name.startswith("test_c") or "_" not in name[6:]:
        return
    key = name[6:].split("_", 1)[0]
    if not key.isdigit():
        return
    if report.failed or (report.when == "call" and report.outcome == "passed"):
        prev = _CRITERIA.get(int(key), (True, name))[0]
        _CRITERIA[int(key)] = (prev and report.passed, name)


def pytest_terminal_summary(terminalreporter):
    if not _CRITERIA:
        return
    terminalreporter.section("acceptance criteria")
    for key in sorted(_CRITERIA):
        ok, name = _CRITERIA[key]
        terminalreporter.write_line(f"criterion {key}: {'PASS' if ok else 'FAIL'}  ({name})")
