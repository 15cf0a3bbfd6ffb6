import pytest

from driftscan import EventLog
from driftscan.petri_net import PetriNet, Transition


def split(text):
    return [tuple(word) for word in text.split()]


# nine traces over the A..G net used for the precision walkthrough
PC_LOG = split("ABCDEG ACBDEG ABCDEG ACBDEG ACBDEG ABCDEG ABCDEG ACBDEG ABCDEG")

# 16-trace drift logs: L1 goes from B||C to B;C after trace 8, L2 the other way
L1 = split("ABCDEG ACBDEG ABCDFG ACBDFG " * 2 + "ABCDEG ABCDFG " * 4)
L2 = split("ABCDEG ABCDFG " * 4 + "ABCDEG ACBDEG ABCDFG ACBDFG " * 2)


def make_abcdefg_net():
    """A, then B and C concurrently, D, a choice of E or F, then G."""
    places = [f"p{k}" for k in range(1, 9)]
    transitions = [Transition(a, a) for a in "ABCDEFG"]
    arcs = [
        ("p1", "A"), ("A", "p2"), ("A", "p3"),
        ("p2", "B"), ("B", "p4"), ("p3", "C"), ("C", "p5"),
        ("p4", "D"), ("p5", "D"), ("D", "p6"),
        ("p6", "E"), ("p6", "F"), ("E", "p7"), ("F", "p7"),
        ("p7", "G"), ("G", "p8"),
    ]
    return PetriNet(places, transitions, arcs)


def make_sequential_net():
    """Same as the concurrent net but B strictly before C."""
    places = [f"p{k}" for k in range(1, 8)]
    transitions = [Transition(a, a) for a in "ABCDEFG"]
    arcs = [
        ("p1", "A"), ("A", "p2"), ("p2", "B"), ("B", "p3"), ("p3", "C"), ("C", "p4"),
        ("p4", "D"), ("D", "p5"), ("p5", "E"), ("p5", "F"), ("E", "p6"), ("F", "p6"),
        ("p6", "G"), ("G", "p7"),
    ]
    return PetriNet(places, transitions, arcs)


@pytest.fixture
def abcdefg_net():
    return make_abcdefg_net()


@pytest.fixture
def sequential_net():
    return make_sequential_net()


@pytest.fixture
def pc_log():
    return EventLog.from_activities(PC_LOG)


# ---------------------------------------------------------------------------
# per-criterion summary for the acceptance suite

_criteria: dict[int, list[tuple[str, bool]]] = {}


def pytest_configure(config):
    config.addinivalue_line("markers", "criterion(k): acceptance criterion k")


def pytest_runtest_logreport(report):
    marker = getattr(report, "criterion", None)
    if marker is None:
        return
    if report.when == "call" or report.failed or report.skipped:
        _criteria.setdefault(marker, [])
        _criteria[marker].append((report.nodeid, report.passed))


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    mark = item.get_closest_marker("criterion")
    if mark is not None:
        outcome.get_result().criterion = mark.args[0]


def pytest_terminal_summary(terminalreporter):
    if not _criteria:
        return
    terminalreporter.section("acceptance criteria")
    for k in sorted(_criteria):
        runs = _criteria[k]
        failed = [nodeid.split("::")[-1] for nodeid, ok in runs if not ok]
        line = f"criterion {k}: {'FAIL' if failed else 'PASS'} ({len(runs) - len(failed)}/{len(runs)} checks)"
        if failed:
            line += " failed: " + ", ".join(failed)
        terminalreporter.write_line(line)
