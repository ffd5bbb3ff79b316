import itertools
from pathlib import Path

import pytest

from modalqm import documents as D
from modalqm.lattice import boolean_algebra, mo, product

FIXTURES = Path(__file__).resolve().parents[1] / "src" / "modalqm" / "fixtures"

ACCEPTANCE_LINES: list[str] = []


def fixture(name):
    return FIXTURES / name


def load(name):
    return D.structure_from_doc(D.read(fixture(name)))


def load_vectors(name):
    return D.vectors_from_doc(D.read(fixture(name)))


def base_lattices():
    return [boolean_algebra(n) for n in range(1, 5)] + [mo(n) for n in range(1, 5)]


def corpus_lattices():
    """Every full lattice of the corpus: 2^n and MO(n) for n <= 4, all their
    pairwise products, and the two pasted Greechie lattices."""
    base = base_lattices()
    prods = [product(a, b) for a, b in itertools.combinations_with_replacement(base, 2)]
    return base + prods + [load("greechie_two_blocks.lat"), load("greechie_state_free.lat")]


@pytest.fixture(scope="session")
def corpus():
    return corpus_lattices()


@pytest.fixture(scope="session")
def small_corpus():
    base = base_lattices()
    return base + [product(mo(2), boolean_algebra(1)), product(boolean_algebra(1), boolean_algebra(2)),
                   load("greechie_two_blocks.lat")]


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
