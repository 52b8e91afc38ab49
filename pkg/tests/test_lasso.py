import random

import pytest

from streett_det.determinize import build_drta
from streett_det.errors import DomainError
from streett_det.lasso import brute_force_good_cycle, det_accepts, nsa_accepts, product_graph, streett_good_cycle_exists
from streett_det.omega import Lasso

from conftest import make_nsa


def two_state(loop_on_q1=True):
    transitions = [(0, 0, 0), (0, 0, 1)] + ([(1, 0, 1)] if loop_on_q1 else [])
    return make_nsa(2, transitions, [({1}, {0})])


def test_no_pairs_means_an_infinite_run_exists():
    nsa = make_nsa(2, [(0, 0, 1)], [], sigma=1)
    assert not nsa_accepts(nsa, Lasso((), (0,)))
    nsa = make_nsa(2, [(0, 0, 1), (1, 0, 1)], [], sigma=1)
    assert nsa_accepts(nsa, Lasso((), (0,)))


def test_two_state_fixture():
    assert nsa_accepts(two_state(), Lasso((), (0,)))
    assert not nsa_accepts(two_state(loop_on_q1=False), Lasso((), (0,)))


def test_alphabet_mismatch():
    with pytest.raises(DomainError):
        nsa_accepts(two_state(), Lasso((), (1,)))


def test_good_cycle_small_graphs():
    assert streett_good_cycle_exists([0], {(0, 0): None}, [])
    edges = {(0, 1): None, (1, 0): None}
    assert not streett_good_cycle_exists([0, 1], edges, [({2}, {1})])


def test_transition_pairs_are_read_on_edges():
    t = (0, 0, 0)
    nsa = make_nsa(1, [t], [(set(), {t})], basis="transition")
    assert not nsa_accepts(nsa, Lasso((), (0,)))
    nsa = make_nsa(1, [t], [({t}, {t})], basis="transition")
    assert nsa_accepts(nsa, Lasso((), (0,)))


def test_product_graph_follows_lasso_positions():
    g = product_graph(two_state(), Lasso((0,), (0, 0)))
    assert set(g.initial) == {(0, 0)}
    assert all(dst[1] in (1, 2) for _, dst in g.edges)


def test_random_graphs_match_brute_force():
    rng = random.Random(5)
    for _ in range(100):
        size = rng.randint(1, 6)
        vertices = list(range(size))
        edges = {(a, b): None for a in vertices for b in vertices if rng.random() < 0.3}
        pairs = [
            (frozenset(v for v in vertices if rng.random() < 0.3), frozenset(v for v in vertices if rng.random() < 0.3))
            for _ in range(rng.randint(0, 3))
        ]
        assert streett_good_cycle_exists(vertices, edges, pairs) == brute_force_good_cycle(vertices, edges, pairs)


def test_unrolling_does_not_change_membership():
    rng = random.Random(2)
    nsa = make_nsa(3, [(p, a, q) for p in range(3) for a in range(2) for q in range(3) if rng.random() < 0.5],
                   [({1}, {0}), ({2}, {1})], sigma=2)
    drta = build_drta(nsa)
    for _ in range(60):
        u = tuple(rng.randrange(2) for _ in range(rng.randint(0, 2)))
        v = tuple(rng.randrange(2) for _ in range(rng.randint(1, 3)))
        forms = [Lasso(u, v), Lasso(u + v, v), Lasso(u, v + v)]
        assert len({nsa_accepts(nsa, w) for w in forms}) == 1
        assert len({det_accepts(drta, w) for w in forms}) == 1


def test_dropping_a_pair_never_shrinks_the_language():
    rng = random.Random(8)
    for _ in range(20):
        transitions = [(p, 0, q) for p in range(3) for q in range(3) if rng.random() < 0.5]
        pairs = [({rng.randrange(3)}, {rng.randrange(3)}) for _ in range(2)]
        full = make_nsa(3, transitions, pairs)
        fewer = make_nsa(3, transitions, pairs[:1])
        for u in range(3):
            w = Lasso((0,) * u, (0,))
            assert not nsa_accepts(full, w) or nsa_accepts(fewer, w)


def test_dead_cycle_letter_rejects():
    nsa = make_nsa(1, [(0, 0, 0)], [({0}, set())], sigma=2)
    drta = build_drta(nsa)
    for w in [Lasso((), (1,)), Lasso((0,), (0, 1)), Lasso((1,), (0,))]:
        assert not det_accepts(drta, w)
