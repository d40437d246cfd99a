from hypothesis import settings

settings.register_profile("default", max_examples=60, deadline=None)
settings.load_profile("default")

_ACCEPTANCE: dict[str, tuple[str, str]] = {}


def pytest_runtest_logreport(report):
    if "test_acceptance.py" not in report.nodeid:
        return
    name = report.nodeid.split("::")[-1]
    if report.when == "call" or report.failed:
        detail = ""
        if report.failed and report.longrepr is not None:
            detail = str(getattr(report.longrepr, "reprcrash", None) and report.longrepr.reprcrash.message or "")
        _ACCEPTANCE.setdefault(name, ("PASS" if report.passed else "FAIL", detail.splitlines()[0] if detail else ""))


def pytest_terminal_summary(terminalreporter):
    if not _ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for name, (status, detail) in sorted(_ACCEPTANCE.items(), key=lambda kv: int(kv[0].split("_")[2])):
        line = f"{status}  {name}"
        terminalreporter.write_line(f"{line}  ({detail})" if detail else line)
