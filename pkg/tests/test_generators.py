from pathlib import Path

import pytest

from streett_det.errors import CapacityError, DomainError
from streett_det.formats import emit_automaton
from streett_det.generators import (
    FullStreettFamily,
    GenSpec,
    enumerate_lassos,
    full_streett,
    random_nsa,
    sample_lassos,
    to_state_based,
)
from streett_det.lasso import nsa_accepts
from streett_det.omega import Lasso

from conftest import make_nsa

GOLDEN = Path(__file__).parent / "golden" / "random_nsa.txt"


def test_random_nsa_is_a_function_of_the_spec():
    spec = GenSpec(3, 2, 2, density=0.4, seed=9)
    assert random_nsa(spec) == random_nsa(spec)
    assert random_nsa(spec) != random_nsa(GenSpec(3, 2, 2, density=0.4, seed=10))


def test_density_one_is_complete():
    nsa = random_nsa(GenSpec(3, 1, 2, density=1.0, seed=1))
    assert len(nsa.transitions) == 3 * 2 * 3


def test_gen_spec_validation():
    with pytest.raises(DomainError):
        GenSpec(0, 1)
    with pytest.raises(DomainError):
        GenSpec(1, 1, density=0.0)


def test_golden_corpus():
    out = []
    for seed in range(12):
        spec = GenSpec(1 + seed % 4, 1 + seed % 3, 2, (0.3, 0.6, 1.0)[seed % 3], 0.3, seed)
        out.append(f"# seed {seed}\n" + emit_automaton(random_nsa(spec)))
    assert "".join(out) == GOLDEN.read_text(encoding="utf-8")


def test_full_streett_sizes():
    small = full_streett(1, 1)
    assert small.alphabet.size == 8
    assert FullStreettFamily(2, 1).alphabet_size == 4096
    for n, k in [(1, 1), (1, 2), (2, 1)]:
        family = FullStreettFamily(n, k)
        if family.bits <= 12:
            assert family.alphabet_size == 2 ** (n * (2 * k + 1) * n)
    with pytest.raises(CapacityError):
        full_streett(3, 1)
    assert isinstance(full_streett(3, 1, lazy=True), FullStreettFamily)


def test_full_streett_single_marked_edge():
    family = FullStreettFamily(2, 1)
    letter = family.letter_index([(0, 1, 1)])
    nsa = family.restrict([letter])
    assert nsa.transitions == {(0, 0, 1)}
    assert nsa.pairs[0] == ({(0, 0, 1)}, frozenset())
    assert family.letter(letter) == {(0, 1, 1)}
    assert nsa.initial == {0, 1}


def test_unmarked_conversion_is_isomorphic():
    nsa = make_nsa(2, [(0, 0, 1), (1, 0, 0)], [(set(), set())], basis="transition")
    out = to_state_based(nsa)
    assert out.n == 2 and out.transitions == nsa.transitions
    assert out.pairs == ((frozenset(), frozenset()),)
    assert to_state_based(nsa) == out


def test_conversion_preserves_membership_small():
    nsa = full_streett(1, 1)
    converted = to_state_based(nsa)
    for w in enumerate_lassos(8, 1, 2):
        assert nsa_accepts(nsa, w) == nsa_accepts(converted, w)


def test_conversion_cap():
    with pytest.raises(CapacityError):
        to_state_based(full_streett(1, 1), cap=2)


def test_enumerate_lassos_counts_and_order():
    assert list(enumerate_lassos(2, 0, 1)) == [Lasso((), (0,)), Lasso((), (1,))]
    words = list(enumerate_lassos(2, 1, 2))
    assert len(words) == len(set(words)) == 18
    assert words == list(enumerate_lassos(2, 1, 2))
    lengths = [len(w.prefix) + len(w.cycle) for w in words]
    assert lengths == sorted(lengths)
    with pytest.raises(DomainError):
        list(enumerate_lassos(2, 1, 0))


def test_sample_lassos_seeded():
    assert sample_lassos(3, 2, 3, 10, seed=1) == sample_lassos(3, 2, 3, 10, seed=1)
    assert all(1 <= len(w.cycle) <= 3 and len(w.prefix) <= 2 for w in sample_lassos(3, 2, 3, 50))
