import collections

# criterion number -> list of (ok, detail) recorded by the acceptance tests
ACCEPTANCE = collections.defaultdict(list)


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for key in sorted(ACCEPTANCE):
        parts = ACCEPTANCE[key]
        status = "PASS" if all(ok for ok, _ in parts) else "FAIL"
        details = "; ".join(d for _, d in parts)
        terminalreporter.write_line(f"criterion {key}: {status} - {details}")
