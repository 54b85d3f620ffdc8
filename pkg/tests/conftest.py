import pytest

# criterion number -> (passed, title, detail), filled by test_acceptance.py
ACCEPTANCE = {}


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for k in sorted(ACCEPTANCE):
        ok, title, detail = ACCEPTANCE[k]
        terminalreporter.write_line(f"[{'PASS' if ok else 'FAIL'}] {k}. {title}: {detail}")


@pytest.fixture
def acceptance():
    def record(k, title, ok, detail):
        ACCEPTANCE[k] = (bool(ok), title, detail)
        print(f"[{'PASS' if ok else 'FAIL'}] {k}. {title}: {detail}")
        return ok

    return record
