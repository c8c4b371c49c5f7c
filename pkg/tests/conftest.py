import pytest

_criteria = []


class ScriptedSource:
    """Uniform source that replays a fixed list and records consumption."""

    def __init__(self, values):
        self.values = list(values)
        self.used = 0

    def uniform(self):
        if self.used >= len(self.values):
            raise AssertionError(f"script exhausted after {self.used} uniforms")
        u = self.values[self.used]
        self.used += 1
        return u


@pytest.fixture
def scripted():
    return ScriptedSource


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    report = outcome.get_result()
    marker = item.get_closest_marker("criterion")
    if marker is None:
        return
    if report.when == "call" or (report.when == "setup" and report.outcome != "passed"):
        _criteria.append((marker.args[0], report.outcome))


def pytest_terminal_summary(terminalreporter):
    if not _criteria:
        return
    terminalreporter.section("acceptance criteria")
    for name, outcome in _criteria:
        status = "PASS" if outcome == "passed" else "FAIL"
        terminalreporter.write_line(f"{status}  {name}")
