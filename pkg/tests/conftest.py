"""Collects acceptance-criterion outcomes and prints one line per criterion."""

import pytest

_RESULTS = {}
_MEASURE_KEY = pytest.StashKey[dict]()


def pytest_configure(config):
    config.addinivalue_line(
        "markers", "acceptance(number, title): test that decides one acceptance criterion")


@pytest.fixture
def measure(request):
    """Dict the test fills with headline numbers; shown in the summary line."""
    data = {}
    request.node.stash[_MEASURE_KEY] = data
    return data


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    report = outcome.get_result()
    marker = item.get_closest_marker("acceptance")
    if marker is None:
        return
    number, title = marker.args
    failed = report.failed
    if report.when == "call" or failed:
        prev = _RESULTS.get(number)
        ok = not failed and (prev is None or prev[1])
        _RESULTS[number] = (title, ok, item.stash.get(_MEASURE_KEY, {}))


def _fmt(value):
    if isinstance(value, float):
        return f"{value:.3g}"
    return str(value)


def pytest_terminal_summary(terminalreporter):
    if not _RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(_RESULTS):
        title, ok, data = _RESULTS[number]
        detail = ", ".join(f"{k}={_fmt(v)}" for k, v in data.items())
        line = f"AC{number} {'PASS' if ok else 'FAIL'}  {title}"
        terminalreporter.write_line(f"{line}  [{detail}]" if detail else line)
