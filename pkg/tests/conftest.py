import pytest

from egorank.graph import extract_ego, load_graph


@pytest.fixture
def star():
    """S5: hub ``c`` with leaves l1..l5."""
    return load_graph([f"c l{i}" for i in range(1, 6)])


@pytest.fixture
def star_view(star):
    return extract_ego(star, "c", 1)


@pytest.fixture
def path_view():
    return extract_ego(load_graph(["a b", "b c", "c d"]), "a", 2)


@pytest.fixture
def c4():
    return load_graph(["0 1", "1 2", "2 3", "3 0"])


@pytest.fixture
def chord_graph():
    """C4 a-b-c-d with chord a-c, observer o hanging off a.

    From o at 2 hops: L1 = {a}, L2 = {b, c, d}; b-c and c-d join two L2 nodes
    and are hidden, leaving o-a, a-b, a-c, a-d.
    """
    return load_graph(["o a", "a b", "b c", "c d", "d a", "a c"])


ACCEPTANCE_RESULTS: list[tuple[str, bool, str]] = []


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE_RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for name, ok, detail in ACCEPTANCE_RESULTS:
        terminalreporter.write_line(f"[{'PASS' if ok else 'FAIL'}] {name}: {detail}")
