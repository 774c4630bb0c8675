def pytest_terminal_summary(terminalreporter):
    try:
        from test_acceptance import RESULT_LINES
    except ImportError:
        return
    if not RESULT_LINES:
        return
    terminalreporter.section("acceptance criteria")
    for n in sorted(RESULT_LINES):
        terminalreporter.write_line(RESULT_LINES[n])
