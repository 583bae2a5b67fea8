import pytest

_LINES = []


@pytest.fixture
def criterion(request):
    """Record one acceptance line; the test body passes or fails it."""

    def record(number, text):
        request.node._acceptance = (number, text)

    yield record
    info = getattr(request.node, "_acceptance", None)
    if info is not None:
        report = getattr(request.node, "rep_call", None)
        status = "PASS" if report is not None and report.passed else "FAIL"
        _LINES.append((info[0], f"{status} criterion {info[0]:>2}: {info[1]}"))


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    rep = outcome.get_result()
    if rep.when == "call":
        item.rep_call = rep


def pytest_terminal_summary(terminalreporter):
    if _LINES:
        terminalreporter.section("acceptance criteria")
        for _, line in sorted(_LINES):
            terminalreporter.write_line(line)
