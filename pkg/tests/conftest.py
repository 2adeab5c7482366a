import pytest

_ACCEPTANCE = []


@pytest.fixture
def acceptance_log():
    """Collects (criterion, CheckResult) pairs for the terminal summary."""
    return _ACCEPTANCE


def pytest_terminal_summary(terminalreporter):
    if not _ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for number, result in sorted(_ACCEPTANCE, key=lambda item: item[0]):
        relation = ">=" if result.check in ("commutator",) else "<="
        terminalreporter.write_line(
            f"{'PASS' if result.passed else 'FAIL'} criterion {number:2d} {result.check}: "
            f"measured {result.measured:.3e} {relation} {result.tolerance:.1e} "
            f"({result.seconds:.1f} s)")
