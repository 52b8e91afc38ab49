import itertools
import random

import pytest

from streett_det.errors import DomainError
from streett_det.indices import GFamily, cover, from_mask, mini, to_mask


def brute_cover(beta, goods):
    g_beta = set().union(*[goods[i - 1] for i in beta]) if beta else set()
    return {j for j in range(1, len(goods) + 1) if goods[j - 1] <= g_beta}


def brute_mini(beta, goods):
    k = len(goods)
    g_beta = set().union(*[goods[i - 1] for i in beta]) if beta else set()
    rest = [j for j in range(1, k + 1) if j not in brute_cover(beta, goods)]
    ext = {j: goods[j - 1] | g_beta for j in rest}
    out = set()
    for j in rest:
        cond1 = not any(ext[o] < ext[j] for o in rest if o != j)
        cond2 = not any(ext[o] == ext[j] for o in rest if o < j)
        if cond1 and cond2:
            out.add(j)
    return out


def test_example1_values(example1_family):
    assert cover({3}, example1_family) == {3, 4}
    assert mini({3}, example1_family) == {1}


def test_full_set(example1_family):
    assert cover({1, 2, 3, 4}, example1_family) == {1, 2, 3, 4}
    assert mini({1, 2, 3, 4}, example1_family) == set()


def test_out_of_range(example1_family):
    with pytest.raises(DomainError):
        cover({5}, example1_family)
    with pytest.raises(DomainError):
        mini({0}, example1_family)


def test_masks_round_trip():
    assert from_mask(to_mask({1, 4})) == {1, 4}


def test_random_families_match_predicates():
    rng = random.Random(7)
    for _ in range(200):
        k = rng.randint(0, 5)
        goods = [set(q for q in range(4) if rng.random() < 0.4) for _ in range(k)]
        fam = GFamily(goods)
        for size in range(k + 1):
            for beta in itertools.combinations(range(1, k + 1), size):
                c = cover(beta, fam)
                m = mini(beta, fam)
                assert c == brute_cover(beta, goods)
                assert m == brute_mini(beta, goods)
                assert set(beta) <= c
                assert not (m & c)
                assert (not m) == (c == set(range(1, k + 1)))
                values = [frozenset(goods[j - 1]) | frozenset().union(*[goods[i - 1] for i in beta]) for j in m]
                assert len(values) == len(set(values))
