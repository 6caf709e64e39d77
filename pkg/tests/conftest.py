import math

import numpy as np
import pytest

from ris_linkopt import LinkBudget, reference_scenario


@pytest.fixture(scope="session")
def reference():
    return reference_scenario()


@pytest.fixture(scope="session")
def reference_budget(reference):
    return reference.scenario().budget()


@pytest.fixture
def unit_budget():
    return LinkBudget.from_amplitudes(1.0, 1.0, 0.7)


def random_budgets(n, seed=0):
    """Desk-scale synthetic budgets with O(1) amplitudes."""
    rng = np.random.default_rng(seed)
    return [
        LinkBudget.from_amplitudes(
            rng.uniform(0.2, 3.0), rng.uniform(0.05, 3.0), rng.uniform(-1e4, 1e4)
        )
        for _ in range(n)
    ]


def circ_dist(a, b):
    d = (a - b) % (2 * math.pi)
    return min(d, 2 * math.pi - d)


ACCEPTANCE_LINES = []


def record_verdict(number, ok, detail):
    """Log a PASS/FAIL line for acceptance criterion ``number``."""
    line = f"criterion {number}: {'PASS' if ok else 'FAIL'} - {detail}"
    ACCEPTANCE_LINES.append(line)
    print(line)
    return ok


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(ACCEPTANCE_LINES, key=lambda s: int(s.split()[1].rstrip(":"))):
            terminalreporter.write_line(line)
