from hypothesis import HealthCheck, settings

settings.register_profile("fconn", deadline=None, suppress_health_check=[HealthCheck.too_slow])
settings.load_profile("fconn")


def pytest_terminal_summary(terminalreporter):
    from test_acceptance import RESULTS
    if RESULTS:
        terminalreporter.section("acceptance criteria")
        for n in sorted(RESULTS):
            terminalreporter.write_line(RESULTS[n])
