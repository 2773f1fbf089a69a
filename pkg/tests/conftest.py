import pytest

_RESULTS = pytest.StashKey[dict]()


def pytest_configure(config):
    config.addinivalue_line("markers", "criterion(n): numbered acceptance criterion checked by the test")
    config.stash[_RESULTS] = {}


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    rep = outcome.get_result()
    mark = item.get_closest_marker("criterion")
    if mark is None or not (rep.when == "call" or rep.failed):
        return
    n = mark.args[0]
    detail = dict(item.user_properties).get("detail", "")
    if rep.failed and not detail:
        detail = f"raised during {rep.when}: {call.excinfo.typename if call.excinfo else '?'}"
    prev_ok, prev_detail = item.config.stash[_RESULTS].get(n, (True, ""))
    item.config.stash[_RESULTS][n] = (prev_ok and rep.passed, detail or prev_detail)


def pytest_terminal_summary(terminalreporter, config):
    results = config.stash.get(_RESULTS, {})
    if not results:
        return
    terminalreporter.section("acceptance criteria")
    for n in sorted(results):
        ok, detail = results[n]
        terminalreporter.write_line(f"criterion {n:2d}: {'PASS' if ok else 'FAIL'}  {detail}")
