import random

import pytest

from streett_det.errors import DomainError, InvariantViolation
from streett_det.indices import to_mask
from streett_det.omega import MuName
from streett_det.trees import (
    H_SAFRA,
    LIR,
    HSafraTree,
    LirHSafraTree,
    TreeNode,
    assign_names_mb,
    assign_names_mn,
    canonical_encode,
    check_invariants,
    decode_tree,
    j_value,
    preorder,
    stor_sort,
)


def node(l, h, *children, name=None):
    return TreeNode(to_mask(l), to_mask(h), list(children), name=name)


def test_j_value():
    parent = node({0}, {1, 2, 3})
    assert j_value(node({0}, {1, 2, 3}), parent) == 0
    assert j_value(node({0}, {1, 3}), parent) == 2
    with pytest.raises(DomainError):
        j_value(parent, None)


def test_stor_sort_is_stable_descending():
    parent = node({0}, {1, 2, 3})
    kids = [node({0}, {1, 3}), node({1}, {1, 2}), node({2}, {2, 3}), node({3}, {1, 3})]
    assert [j_value(c, parent) for c in kids] == [2, 3, 1, 2]
    ordered = stor_sort(kids, parent)
    assert [j_value(c, parent) for c in ordered] == [3, 2, 2, 1]
    assert ordered[1] is kids[0] and ordered[2] is kids[3]
    same = [node({0}, {1, 3}), node({1}, {1, 3})]
    assert stor_sort(same, parent) == same


def test_stor_sort_matches_insertion_sort():
    rng = random.Random(3)
    parent = node({0}, {1, 2, 3, 4})
    for _ in range(200):
        kids = [node({0}, {1, 2, 3, 4} - {rng.randint(0, 4)}) for _ in range(rng.randint(0, 6))]
        reference = []
        for c in kids:
            i = len(reference)
            while i and j_value(reference[i - 1], parent) < j_value(c, parent):
                i -= 1
            reference.insert(i, c)
        assert stor_sort(kids, parent) == reference


def test_mn_names_single_branch():
    leaf = node({0}, set())
    mid = node({0}, {1}, leaf)
    root = node({0}, {1, 2}, mid)
    names = assign_names_mn(root)
    assert names[root] == ()
    assert names[mid] == ((2, 1),)
    assert names[leaf] == ((2, 1), (1, 1))


def test_mn_names_occurrence_counts_equal_j_siblings():
    a, b = node({0}, {1, 3}), node({1}, {1, 3})
    root = node({0, 1}, {1, 2, 3}, a, b)
    names = assign_names_mn(root)
    assert names[b] == ((2, 2),)
    assert assign_names_mn(root) == names
    assert len(set(names.values())) == 3


def test_mb_initial_spine():
    c = node({0}, set())
    b = node({0}, {1}, c)
    root = node({0}, {1, 2}, b)
    assign_names_mb(root, 1)
    assert [x.name for x in preorder(root)] == [MuName(1, 1), MuName(1, 2), MuName(1, 3)]


def test_mb_bucket_recycled():
    a = node({0}, {1})
    b = node({1}, {1})
    root = node({0, 1}, {1, 2}, a, b)
    events = assign_names_mb(root, 2)
    assert b.name == MuName(2, 1) and events.created == [1, 2]
    root.children.remove(b)
    assign_names_mb(root, 2)
    assert {x.name.bucket for x in preorder(root)} == {1}
    fresh = node({1}, {1})
    root.children.append(fresh)
    assign_names_mb(root, 2)
    assert fresh.name == MuName(2, 1)


def test_mb_graft_renames_onto_host_spine():
    y = node({0}, set(), name=MuName(3, 2))
    x = node({0}, {1}, y, name=MuName(3, 1))
    a = node({0}, {1, 2}, x, name=MuName(1, 2))
    b = node({1}, {1, 2}, name=MuName(2, 1))
    root = node({0, 1}, {1, 2, 3}, a, b, name=MuName(1, 1))
    events = assign_names_mb(root, 3)
    assert (x.name, y.name) == (MuName(1, 3), MuName(1, 4))
    assert b.name == MuName(2, 1)
    assert events.grafts == [(3, 1, 2)]
    assert events.released == [3]


def test_mb_bucket_exhaustion():
    root = node({0}, {1}, node({0}, set()), node({0}, set()))
    with pytest.raises(InvariantViolation):
        assign_names_mb(root, 1)


def test_invariants_flag_shared_sibling_state():
    root = node({0, 1}, {1}, node({0}, set()), node({0, 1}, set()))
    problems = check_invariants(HSafraTree(root, 2, 1, 1))
    assert any("overlaps a sibling" in p for p in problems)


def test_invariants_flag_oversized_tree():
    root = node({0}, {1, 2}, node({0}, {1}, node({0}, set())))
    problems = check_invariants(HSafraTree(root, 1, 2, 1))
    assert any("more than n(mu+1)" in p for p in problems)


def test_invariants_flag_bad_index_chain():
    root = node({0}, {1, 2}, node({0}, set()))
    problems = check_invariants(HSafraTree(root, 1, 2, 1))
    assert any("index" in p for p in problems)


def random_tree(rng, n, k, depth=0):
    l = rng.randrange(1, 1 << n)
    h = to_mask(i for i in range(1, k + 1) if rng.random() < 0.6)
    kids = [random_tree(rng, n, k, depth + 1) for _ in range(rng.randint(0, 2 if depth < 2 else 0))]
    return TreeNode(l, h, kids)


def structure(t):
    return (t.l, t.h, tuple(structure(c) for c in t.children))


def test_encoding_injective_on_random_trees():
    rng = random.Random(11)
    seen = {}
    for _ in range(10_000):
        root = random_tree(rng, 2, 2)
        code = canonical_encode(HSafraTree(root, 2, 2, 2))
        shape = structure(root)
        assert seen.setdefault(code, shape) == shape
    assert len(set(seen.values())) == len(seen)


def test_encoding_lir_mode_contract():
    a, b = node({0}, set()), node({1}, set())
    root = node({0, 1}, {1}, a, b)
    tree = HSafraTree(root, 2, 1, 1)
    one = LirHSafraTree(tree, [root, a, b])
    two = LirHSafraTree(tree, [root, b, a])
    assert canonical_encode(one) != canonical_encode(two)
    assert canonical_encode(one, H_SAFRA) == canonical_encode(two, H_SAFRA)
    assert canonical_encode(one) == canonical_encode(one)
    back = decode_tree(canonical_encode(two), 2, 1, 1)
    assert canonical_encode(back) == canonical_encode(two)
    assert canonical_encode(back, LIR) == canonical_encode(two, LIR)
