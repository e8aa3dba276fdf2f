import pytest

_RESULTS = pytest.StashKey[dict]()


@pytest.fixture
def criterion(request):
    """Record one acceptance line: ``criterion(number, title, checks)``.

    ``checks`` is a list of ``(description, ok)``; the test fails unless all pass.
    """
    results = request.config.stash.setdefault(_RESULTS, {})

    def record(number, title, checks):
        ok = all(c[1] for c in checks)
        failed = [c[0] for c in checks if not c[1]]
        line = f"criterion {number} ({title}): {'PASS' if ok else 'FAIL'}"
        if failed:
            line += "; failing: " + "; ".join(failed)
        results[number] = line
        print(line)
        for desc, good in checks:
            print(f"    [{'ok' if good else 'FAIL'}] {desc}")
        assert ok, line

    return record


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    results = config.stash.get(_RESULTS, {})
    if results:
        terminalreporter.section("acceptance criteria")
        for number in sorted(results):
            terminalreporter.write_line(results[number])
