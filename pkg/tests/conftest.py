import warnings

import numpy as np
import pytest

from heunterm import verify
from heunterm.errors import OutsideDiskWarning

SETS_PER_N = 20
MAX_N = 5

_criteria: dict[int, dict] = {}


def pytest_configure(config):
    config.addinivalue_line("markers", "criterion(number, title): acceptance criterion")


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    report = outcome.get_result()
    marker = item.get_closest_marker("criterion")
    if marker is None:
        return
    number, title = marker.args
    entry = _criteria.setdefault(number, {"title": title, "ok": True, "seen": False})
    if report.when == "call" or report.failed or report.skipped:
        entry["seen"] = True
        if report.failed or report.skipped:
            entry["ok"] = False


def pytest_terminal_summary(terminalreporter):
    if not _criteria:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(_criteria):
        entry = _criteria[number]
        verdict = "PASS" if entry["ok"] and entry["seen"] else "FAIL"
        terminalreporter.write_line(f"criterion {number:>2}: {verdict}  {entry['title']}")


class SolutionBank:
    """Random terminating solutions per (equation, N), computed once per session."""

    def __init__(self):
        self._cache = {}

    def get(self, equation: str, N: int) -> list:
        key = (equation, N)
        if key not in self._cache:
            rng = np.random.default_rng([2024, N, 0 if equation == "general" else 1])
            eq = verify.EQUATIONS[equation]
            sols = []
            for _ in range(SETS_PER_N):
                params = verify.SAMPLERS[equation](rng, N)
                sols.extend(eq.terminate(params, N))
            self._cache[key] = sols
        return self._cache[key]

    def all(self, max_n: int = MAX_N):
        for equation in ("general", "confluent"):
            for N in range(max_n + 1):
                for sol in self.get(equation, N):
                    yield equation, N, sol


@pytest.fixture(scope="session")
def bank():
    return SolutionBank()


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


@pytest.fixture(autouse=True)
def _quiet_disk_warning():
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", OutsideDiskWarning)
        yield
