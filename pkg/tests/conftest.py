import pytest
from hypothesis import HealthCheck, settings

# derandomized so that repeated runs exercise the same examples
settings.register_profile("repro", derandomize=True, deadline=None,
                          suppress_health_check=[HealthCheck.too_slow])
settings.load_profile("repro")

_CRITERIA: dict[int, dict] = {}


@pytest.fixture
def report(request):
    """Attach a one-line measurement summary to an acceptance criterion."""
    lines: list[str] = []
    request.node.user_properties.append(("report", lines))
    return lines.append


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    rep = outcome.get_result()
    marker = item.get_closest_marker("criterion")
    if marker is None or rep.when not in ("setup", "call"):
        return
    n = marker.args[0]
    entry = _CRITERIA.setdefault(n, {"title": marker.args[1], "passed": True, "notes": []})
    if rep.failed:
        entry["passed"] = False
    if rep.when == "call":
        for key, lines in item.user_properties:
            if key == "report":
                entry["notes"] += lines


def pytest_terminal_summary(terminalreporter):
    if not _CRITERIA:
        return
    terminalreporter.section("acceptance criteria")
    for n in sorted(_CRITERIA):
        e = _CRITERIA[n]
        status = "PASS" if e["passed"] else "FAIL"
        notes = "; ".join(e["notes"])
        terminalreporter.write_line(f"criterion {n:2d} {status}  {e['title']}" + (f"  [{notes}]" if notes else ""))
