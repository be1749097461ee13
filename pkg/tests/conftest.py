def pytest_terminal_summary(terminalreporter):
    from test_acceptance import KEYS, RESULTS

    if not RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for key in KEYS:
        if key in RESULTS:
            terminalreporter.write_line(RESULTS[key].line())
