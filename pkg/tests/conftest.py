from pathlib import Path

import pytest
from hypothesis import settings

settings.register_profile("default", max_examples=60, deadline=None)
settings.load_profile("default")

FIXTURES = Path(__file__).parent / "fixtures"


@pytest.fixture
def fixtures():
    return FIXTURES


# acceptance criteria: one summary line each, aggregated over their checks
CRITERIA = {}


def pytest_configure(config):
    config.addinivalue_line("markers", "criterion(n, title): acceptance criterion checked by this test")


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    rep = outcome.get_result()
    mark = item.get_closest_marker("criterion")
    if mark is None or (rep.when != "call" and not (rep.when == "setup" and rep.skipped)):
        return
    n, title = mark.args
    detail = dict(item.user_properties).get("detail", "")
    if rep.skipped:
        status, detail = "SKIP", str(rep.longrepr[2]) if isinstance(rep.longrepr, tuple) else detail
    else:
        status = "PASS" if rep.passed else "FAIL"
    CRITERIA.setdefault(n, {"title": title, "checks": []})["checks"].append((item.name, status, detail))


def pytest_terminal_summary(terminalreporter):
    if not CRITERIA:
        return
    tr = terminalreporter
    tr.section("acceptance criteria")
    for n in sorted(CRITERIA):
        checks = CRITERIA[n]["checks"]
        statuses = {s for _, s, _ in checks}
        overall = "FAIL" if "FAIL" in statuses else "PASS" if "PASS" in statuses else "SKIP"
        notes = "; ".join(f"{name}={s}{': ' + d if d else ''}" for name, s, d in checks)
        tr.write_line(f"CRITERION {n} {overall}: {CRITERIA[n]['title']} [{notes}]")
