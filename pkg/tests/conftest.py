import itertools

import pytest

from mcelearn.graph import Graph


def cycle(n: int) -> Graph:
    return Graph.from_edges(n, [(i, (i + 1) % n) for i in range(n)])


def path(n: int) -> Graph:
    return Graph.from_edges(n, [(i, i + 1) for i in range(n - 1)])


def star(leaves: int) -> Graph:
    return Graph.from_edges(leaves + 1, [(0, i) for i in range(1, leaves + 1)])


def petersen() -> Graph:
    outer = [(i, (i + 1) % 5) for i in range(5)]
    spokes = [(i, i + 5) for i in range(5)]
    inner = [(5 + i, 5 + (i + 2) % 5) for i in range(5)]
    return Graph.from_edges(10, outer + spokes + inner)


def k4_minus_edge() -> Graph:
    return Graph.from_edges(4, [e for e in itertools.combinations(range(4), 2) if e != (2, 3)])


def two_cliques_bridge(k: int = 10) -> Graph:
    """Two disjoint K_k joined by a single edge."""
    left = list(itertools.combinations(range(k), 2))
    right = [(u + k, v + k) for u, v in left]
    return Graph.from_edges(2 * k, left + right + [(k - 1, k)])


@pytest.fixture
def c5():
    return cycle(5)


# one verdict line per acceptance criterion, collected by tests/test_acceptance.py
VERDICTS: dict[str, tuple[bool, str]] = {}


def record_verdict(criterion: str, ok: bool, detail: str) -> None:
    VERDICTS[criterion] = (ok, detail)
    print(f"criterion {criterion}: {'PASS' if ok else 'FAIL'} ({detail})")


def pytest_terminal_summary(terminalreporter):
    if not VERDICTS:
        return
    terminalreporter.section("acceptance criteria")
    for key in sorted(VERDICTS, key=lambda k: (int(k.rstrip("abcdefgh")), k)):
        ok, detail = VERDICTS[key]
        terminalreporter.write_line(f"criterion {key}: {'PASS' if ok else 'FAIL'} ({detail})")
