import pytest

from fmcwvitals import kernels

_results = {}


def pytest_configure(config):
    config.addinivalue_line("markers", "criterion(number, title): acceptance criterion")


@pytest.fixture(params=[b for b in kernels.BACKENDS if b == "numpy" or kernels.HAVE_NUMBA])
def backend(request):
    prev = kernels.set_backend(request.param)
    yield request.param
    kernels.set_backend(prev)


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    rep = outcome.get_result()
    mark = item.get_closest_marker("criterion")
    if mark is None or (rep.when != "call" and rep.passed):
        return
    number, title = mark.args
    entry = _results.setdefault(number, {"title": title, "failed": [], "passed": 0})
    if rep.failed:
        entry["failed"].append(item.name)
    elif rep.when == "call" and rep.passed:
        entry["passed"] += 1


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    if not _results:
        return
    tr = terminalreporter
    tr.section("acceptance criteria")
    for number in sorted(_results):
        e = _results[number]
        status = "FAIL" if e["failed"] else "PASS"
        extra = f" (failed: {', '.join(e['failed'])})" if e["failed"] else ""
        tr.write_line(f"criterion {number}: {status}  {e['title']}{extra}")
