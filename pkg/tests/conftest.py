import pytest

import acceptance_log
import bezout


@pytest.fixture(autouse=True)
def _bezout_guard(monkeypatch):
    bezout.install(monkeypatch)
    yield


def pytest_terminal_summary(terminalreporter):
    if not acceptance_log.RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for line in acceptance_log.lines():
        terminalreporter.write_line(line)
    s = bezout.STATS
    terminalreporter.write_line(
        f"intersection calls {s['calls']}, points {s['points']}, most points in one call {s['max_points']}, "
        f"worst residual/tau {float(s['worst_ratio']):.3g}"
    )
