import re

import pytest

from hare.instances import random_instance
from hare.model import IsingHamiltonian, SKGraph, ising_to_sk


@pytest.fixture
def running_example() -> IsingHamiltonian:
    # h = (1, 0), J_12 = 3
    return IsingHamiltonian.from_terms(2, {1: 1}, {(1, 2): 3})


@pytest.fixture
def running_graph(running_example) -> SKGraph:
    return ising_to_sk(running_example)


def small_graphs(count: int, max_spins: int = 9, weight_bound: int = 16, seed0: int = 0):
    for k in range(count):
        n = 1 + k % max_spins
        # alternate wide and narrow weight ranges so exact ties show up
        wb = weight_bound if k % 2 else 3
        yield ising_to_sk(random_instance(n, seed0 + k, weight_bound=wb))


def pytest_terminal_summary(terminalreporter):
    lines = []
    for outcome in ("passed", "failed"):
        for rep in terminalreporter.stats.get(outcome, []):
            m = re.search(r"test_acceptance\.py::test_criterion_(\d+)_(\w+)", rep.nodeid)
            if m and rep.when == "call":
                lines.append((int(m.group(1)), m.group(2).replace("_", " "), outcome.upper()))
    if lines:
        terminalreporter.section("acceptance criteria")
        for num, name, outcome in sorted(lines):
            terminalreporter.write_line(f"criterion {num} ({name}): {'PASS' if outcome == 'PASSED' else 'FAIL'}")
