import sys
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))

from euler_orient import graph as gr  # noqa: E402

_ACCEPTANCE_LINES: list[str] = []


@pytest.fixture
def acceptance_log():
    """Collect one PASS/FAIL line per acceptance criterion for the terminal summary."""

    def record(criterion: str, ok: bool, detail: str = "") -> None:
        _ACCEPTANCE_LINES.append(f"{'PASS' if ok else 'FAIL'}  {criterion}  {detail}".rstrip())

    return record


def pytest_terminal_summary(terminalreporter):
    if _ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in _ACCEPTANCE_LINES:
            terminalreporter.write_line(line)


@pytest.fixture(scope="session")
def small_even_graphs():
    """Named even-degree graphs plus a few random ones, all with m <= 24."""
    named = [gr.complete(3), gr.complete(5), gr.complete(7), gr.cycle(4), gr.cycle(7),
             gr.complete_bipartite(2, 2), gr.complete_bipartite(4, 4), gr.circulant(9, [1, 2]),
             gr.disjoint_union(gr.complete(3), gr.complete(3))]
    rand = [gr.random_even_graph(n, t, s) for s, (n, t) in enumerate([(7, 10), (8, 12), (6, 5)])]
    return named + [g for g in rand if g.m <= 24]
