from fractions import Fraction as F

import pytest
from hypothesis import settings

settings.register_profile("default", max_examples=60, deadline=None)
settings.load_profile("default")

# (q, t) pairs used throughout, all with q, t > 1
QT_PAIRS = [(F(4), F(2)), (F(3), F(3, 2)), (F(7, 2), F(9, 4))]


@pytest.fixture(params=QT_PAIRS, ids=lambda p: f"q={p[0]},t={p[1]}")
def qt(request):
    return request.param


# acceptance summary: one line per criterion, built from marked tests
_CRITERIA = {}


def pytest_configure(config):
    config.addinivalue_line("markers", "criterion(n): acceptance criterion number")


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    rep = outcome.get_result()
    mark = item.get_closest_marker("criterion")
    if mark is None or (rep.when != "call" and rep.passed):
        return
    entry = _CRITERIA.setdefault(mark.args[0], {"ok": True, "notes": []})
    if not rep.passed or hasattr(rep, "wasxfail"):
        entry["ok"] = False
        entry["notes"].append(f"{item.name}: {'xfail' if hasattr(rep, 'wasxfail') else rep.outcome}")
    if rep.when == "call":
        entry["notes"] += [f"{k}={v}" for k, v in item.user_properties]


def pytest_terminal_summary(terminalreporter):
    if not _CRITERIA:
        return
    terminalreporter.section("acceptance criteria")
    for n in sorted(_CRITERIA):
        e = _CRITERIA[n]
        terminalreporter.write_line(f"criterion {n:2d}: {'PASS' if e['ok'] else 'FAIL'}  {'; '.join(e['notes'])}")
