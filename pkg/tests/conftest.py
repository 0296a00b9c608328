import pytest

CRITERIA = {
    1: "pipeline timing 12 / 3+9N cycles",
    2: "dense throughput within 2% of 18.8 GSOP/s",
    3: "dense SOP count 655360",
    4: "default energy model 0.266 pJ/SOP within 1%",
    5: "MCCG bandwidth equivalence and gating",
    6: "100 seeded engine vs reference trials bit-exact",
    7: "arithmetic exhaustives",
    8: "codec round-trips and handshake bounds",
    9: "dataset-scale results substituted; energy_per_inference hand case",
}

_outcomes: dict[int, list[bool]] = {}


def pytest_runtest_logreport(report):
    crit = dict(report.user_properties).get("criterion")
    if crit is None:
        return
    if report.when == "call" or report.failed:
        _outcomes.setdefault(crit, []).append(report.passed)


@pytest.fixture
def criterion(request):
    def mark(n):
        request.node.user_properties.append(("criterion", n))
    return mark


def pytest_terminal_summary(terminalreporter):
    if not _outcomes:
        return
    terminalreporter.section("acceptance criteria")
    for n, desc in CRITERIA.items():
        res = _outcomes.get(n)
        status = "NOT RUN" if res is None else ("PASS" if all(res) else "FAIL")
        terminalreporter.write_line(f"criterion {n}: {status:7s} {desc}")
