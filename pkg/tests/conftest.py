import pytest

from streett_det.indices import GFamily
from streett_det.omega import Alphabet, StreettNSA


def make_nsa(n, transitions, pairs, initial=(0,), sigma=1, basis="state"):
    return StreettNSA(
        n,
        Alphabet(sigma),
        frozenset(initial),
        frozenset(transitions),
        tuple((frozenset(g), frozenset(b)) for g, b in pairs),
        basis,
    )


@pytest.fixture
def one_state():
    """Q={q}, Q0={q}, G_1={q}, B_1 empty, one self-loop on the only letter."""
    return make_nsa(1, [(0, 0, 0)], [({0}, set())])


@pytest.fixture
def example1_family():
    return GFamily([{0, 1}, {0}, {1, 2}, {2}])


@pytest.fixture
def example1_nsa():
    return make_nsa(
        3,
        [(p, 0, q) for p in range(3) for q in range(3)],
        [({0, 1}, set()), ({0}, set()), ({1, 2}, set()), ({2}, set())],
    )
