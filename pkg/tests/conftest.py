import re

import pytest

_CRITERIA = {}
_DETAILS = {}


@pytest.fixture
def report(request):
    """Attach a one-line measurement summary to the running acceptance test."""
    name = request.node.name

    def _add(text):
        _DETAILS.setdefault(name, []).append(text)

    return _add


def pytest_runtest_logreport(report):
    m = re.search(r"test_acceptance\.py::(test_criterion_(\d+)\w*)", report.nodeid)
    if not m:
        return
    name, num = m.group(1), int(m.group(2))
    if report.when == "call" or (report.when == "setup" and report.outcome != "passed"):
        _CRITERIA[num] = (name, report.outcome)


def pytest_terminal_summary(terminalreporter):
    if not _CRITERIA:
        return
    tr = terminalreporter
    tr.section("acceptance criteria")
    for num in sorted(_CRITERIA):
        name, outcome = _CRITERIA[num]
        verdict = {"passed": "PASS", "failed": "FAIL"}.get(outcome, outcome.upper())
        detail = "; ".join(_DETAILS.get(name, []))
        tr.write_line(f"criterion {num:2d} {verdict}  {name}" + (f"  [{detail}]" if detail else ""))
