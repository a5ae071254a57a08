import time

import pytest

from siep import _backend, linalg, wsp


@pytest.fixture(params=sorted(_backend.BACKENDS))
def backend(request, monkeypatch):
    """Run the test once per available kernel implementation."""
    k = _backend.BACKENDS[request.param]
    monkeypatch.setattr(linalg, "kernels", k)
    monkeypatch.setattr(wsp, "kernels", k)
    return request.param


def pytest_configure(config):
    config.addinivalue_line("markers", "criterion(number, title): acceptance criterion checked by the test")
    config._criteria = {}


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_call(item):
    start = time.perf_counter()
    yield
    item.user_properties.append(("elapsed", time.perf_counter() - start))


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    rep = outcome.get_result()
    mark = item.get_closest_marker("criterion")
    if mark is None or (rep.when != "call" and not rep.failed):
        return
    number, title = mark.args
    props = dict(item.user_properties)
    elapsed = props.get("elapsed", 0.0) + props.get("setup_elapsed", 0.0)
    item.config._criteria[number] = (title, rep.passed, elapsed, props.get("detail", ""))


def pytest_terminal_summary(terminalreporter, config):
    results = config._criteria
    if not results:
        return
    terminalreporter.write_sep("=", "acceptance criteria")
    for number in sorted(results):
        title, ok, elapsed, detail = results[number]
        line = f"[{'PASS' if ok else 'FAIL'}] {number:2d}. {title} ({elapsed:.2f} s)"
        if detail:
            line += f": {detail}"
        terminalreporter.write_line(line)
