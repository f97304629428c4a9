import pytest

_ACCEPTANCE: dict[int, tuple[str, str, str]] = {}


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    report = outcome.get_result()
    number = getattr(item.function, "criterion", None)
    if number is None or report.when != "call" and not report.failed:
        return
    status = "PASS" if report.passed else "FAIL"
    detail = ""
    if report.failed and call.excinfo is not None:
        detail = str(call.excinfo.value).strip().splitlines()[0] if str(call.excinfo.value).strip() else ""
    prev = _ACCEPTANCE.get(number)
    if prev is None or prev[1] == "PASS":
        _ACCEPTANCE[number] = (item.function.title, status, detail)


def pytest_terminal_summary(terminalreporter):
    if not _ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(_ACCEPTANCE):
        title, status, detail = _ACCEPTANCE[number]
        line = f"criterion {number:2d} {status}  {title}"
        if detail:
            line += f"  [{detail}]"
        terminalreporter.write_line(line)
