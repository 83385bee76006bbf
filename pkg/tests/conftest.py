import pytest

_VERDICTS: list[tuple[int, str, str, str]] = []


def pytest_configure(config):
    config.addinivalue_line("markers", "criterion(number, title): acceptance criterion with a verdict line")


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    rep = outcome.get_result()
    mark = item.get_closest_marker("criterion")
    if mark is None or rep.when != "call":
        return
    number, title = mark.args
    detail = "; ".join(v for k, v in item.user_properties if k == "detail")
    _VERDICTS.append((number, title, "PASS" if rep.passed else "FAIL", detail))


def pytest_terminal_summary(terminalreporter):
    if not _VERDICTS:
        return
    terminalreporter.section("acceptance criteria")
    for number, title, verdict, detail in sorted(_VERDICTS):
        terminalreporter.write_line(f"C{number} {verdict}  {title}  [{detail}]")


@pytest.fixture
def note(request):
    """Attach a human-readable measurement to the criterion verdict line."""
    def _note(text: str) -> None:
        request.node.user_properties.append(("detail", text))
    return _note
