import os

import pytest
from hypothesis import HealthCheck, settings

settings.register_profile("default", max_examples=200, deadline=None,
                          suppress_health_check=[HealthCheck.too_slow])
settings.register_profile("ci", max_examples=50, deadline=None,
                          suppress_health_check=[HealthCheck.too_slow])
settings.load_profile(os.environ.get("HYPOTHESIS_PROFILE", "default"))

DIVIDER = "t\nV1 in 0 DC 1\nR1 in out 1k\nR2 out 0 1k\n.op\n"


@pytest.fixture
def divider_text():
    return DIVIDER


# -- acceptance summary ----------------------------------------------------------------
# tests marked ``criterion(n, text)`` get one PASS/FAIL line each in the terminal summary

_CRITERIA = {}


def pytest_configure(config):
    config.addinivalue_line("markers", "criterion(number, text): acceptance criterion")


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    report = outcome.get_result()
    mark = item.get_closest_marker("criterion")
    if mark is None or report.when != "call" and not report.failed:
        return
    number, text = mark.args
    detail = "; ".join(v for k, v in item.user_properties if k == "detail")
    status = "PASS" if report.passed else "FAIL"
    prev = _CRITERIA.get(number)
    if prev is None or status == "FAIL":
        _CRITERIA[number] = (status, text, detail, report.duration)


def pytest_terminal_summary(terminalreporter):
    if not _CRITERIA:
        return
    tr = terminalreporter
    tr.section("acceptance criteria")
    for number in sorted(_CRITERIA):
        status, text, detail, seconds = _CRITERIA[number]
        tr.write_line(f"criterion {number:2d} {status}  {text} [{seconds:.2f} s]"
                      + (f"  ({detail})" if detail else ""))
    passed = sum(1 for s, *_ in _CRITERIA.values() if s == "PASS")
    tr.write_line(f"{passed}/{len(_CRITERIA)} acceptance criteria passed")
