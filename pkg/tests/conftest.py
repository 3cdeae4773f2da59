import random

import pytest
from hypothesis import strategies as st

from torelli_cert.symplectic import HClass, compose_all, sp_generators


def hclass(genus, lo=-4, hi=4):
    return st.lists(st.integers(lo, hi), min_size=2 * genus, max_size=2 * genus).map(
        lambda c: HClass(tuple(c)))


def random_symplectic(genus, rng, length=5):
    gens = sp_generators(genus)
    return compose_all([rng.choice(gens) for _ in range(length)], genus)


@pytest.fixture
def rng():
    return random.Random(20261018)


_CRITERIA: dict[int, str] = {}


@pytest.fixture
def criterion():
    """Record one PASS/FAIL line for an acceptance criterion and print it."""

    def record(number, ok, detail):
        line = f"criterion {number}: {'PASS' if ok else 'FAIL'} | {detail}"
        _CRITERIA[number] = line
        print(line)
        return ok

    return record


def pytest_terminal_summary(terminalreporter):
    if _CRITERIA:
        terminalreporter.section("acceptance criteria")
        for number in sorted(_CRITERIA):
            terminalreporter.write_line(_CRITERIA[number])
