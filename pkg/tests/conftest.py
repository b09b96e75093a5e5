import pytest
from hypothesis import HealthCheck, settings

settings.register_profile(
    "fixed",
    derandomize=True,
    deadline=None,
    max_examples=100,
    suppress_health_check=[HealthCheck.too_slow],
)
settings.load_profile("fixed")

_criteria: list[tuple[str, bool, str]] = []


@pytest.fixture
def criterion():
    """Record one acceptance line; printed again in the terminal summary."""

    def record(name: str, ok: bool, detail: str = "") -> None:
        line = f"{name}: {'PASS' if ok else 'FAIL'}" + (f"  {detail}" if detail else "")
        print(line)
        _criteria.append((name, ok, detail))

    return record


def pytest_terminal_summary(terminalreporter):
    if not _criteria:
        return
    terminalreporter.section("acceptance criteria")
    for name, ok, detail in sorted(_criteria, key=lambda t: int(t[0].split()[1])):
        terminalreporter.write_line(f"{name}: {'PASS' if ok else 'FAIL'}" + (f"  {detail}" if detail else ""))
