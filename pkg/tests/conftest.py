import pytest


@pytest.fixture
def criterion(record_property):
    """Attach a criterion label and a one-line summary to an acceptance test."""
    def record(label, detail):
        record_property("criterion", label)
        record_property("detail", detail)
    return record


def pytest_terminal_summary(terminalreporter):
    lines = []
    for outcome in ("passed", "failed"):
        for rep in terminalreporter.stats.get(outcome, []):
            if getattr(rep, "when", None) != "call":
                continue
            props = dict(rep.user_properties)
            if "criterion" in props:
                verdict = "PASS" if outcome == "passed" else "FAIL"
                lines.append((props["criterion"], verdict, props["detail"]))
    if not lines:
        return
    terminalreporter.section("acceptance criteria")
    for label, verdict, detail in sorted(lines, key=lambda t: t[0]):
        terminalreporter.write_line(f"{verdict} criterion {label}: {detail}")
