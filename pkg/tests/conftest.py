import pytest

CRITERIA: dict[int, tuple[bool, str]] = {}


@pytest.fixture
def criterion(request):
    """Record a numbered acceptance criterion as PASS/FAIL, then assert it."""

    def report(number: int, ok: bool, detail: str) -> None:
        CRITERIA[number] = (bool(ok), detail)
        print(f"CRITERION {number}: {'PASS' if ok else 'FAIL'} {detail}")
        assert ok, detail

    return report


def pytest_terminal_summary(terminalreporter):
    if not CRITERIA:
        return
    terminalreporter.section("acceptance criteria")
    for n in sorted(CRITERIA):
        ok, detail = CRITERIA[n]
        terminalreporter.write_line(f"CRITERION {n:2d}: {'PASS' if ok else 'FAIL'}  {detail}")
    n_ok = sum(ok for ok, _ in CRITERIA.values())
    terminalreporter.write_line(f"{n_ok}/{len(CRITERIA)} criteria pass")
