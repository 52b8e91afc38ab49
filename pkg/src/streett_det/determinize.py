"""Successor constructions on Safra-style trees and the three determinizers.

``build_drta``
    H-Safra trees, transition-based Rabin acceptance indexed by node names.
``build_dpta``
    LIR-H-Safra trees, transition-based min-even parity acceptance.
``build_dra``
    mu-Safra trees with batch-mode names, state-based Rabin acceptance.

All three share the six-step successor in :func:`_transform`.  Dead moves go
to an explicit sink tree whose root label is empty; every transition into the
sink rejects every Rabin pair and carries the top odd priority.

Two variants exist.  ``literal`` follows the published six steps word for
word.  It accepts too much when a pair skipped by Mini has a nonempty ``B``,
because nothing watches that ``B``.  It accepts too little when a run meets
its pairs only by avoiding ``B``, because a leaf never turns accepting.
``corrected`` (the default) differs in three places and leaves the shape of
every subtree unchanged:

* case b of step 2 resets a child on ``B_i`` for every index ``i`` the
  child newly covers, i.e. ``Cover([k]-h(child)) - Cover([k]-h(parent))``,
  which is ``{j(child)}`` unless Cover adds more;
* when some ``G_i`` is empty while ``B_i`` is not, the root becomes a guard:
  its children all carry ``[k]``, a child is reset on those ``B_i`` like in
  case b, and the root itself never turns accepting;
* a leaf present before the step whose Mini set is empty is accepting.
"""
from __future__ import annotations

from collections import deque
from dataclasses import dataclass
from typing import Callable, List, NamedTuple, Optional

from .errors import CapacityError, DomainError, InvariantViolation
from .indices import GFamily, max_index
from .omega import DPTA, DRA, DRTA, DetTransitionAutomaton, MuName, StreettNSA
from .trees import (
    CORRECTED,
    H_SAFRA,
    LIR,
    LITERAL,
    MU,
    VARIANTS,
    HSafraTree,
    LirHSafraTree,
    MuSafraTree,
    TreeNode,
    assign_names_mb,
    assign_names_mn,
    canonical_encode,
    check_invariants,
    copy_tree,
    j_value,
    node_count,
    preorder,
    stor_sort,
)

DEFAULT_STATE_CAP = 200_000

ACC = "acc"
REJ = "rej"


class RabinSignature(NamedTuple):
    sig_acc: frozenset
    sig_rej: frozenset


class ParitySignature(NamedTuple):
    st: str
    p: int


@dataclass
class SuccessorResult:
    tree: object
    signature: object


def _family(nsa: StreettNSA) -> GFamily:
    fam = nsa.__dict__.get("_gfamily")
    if fam is None:
        fam = GFamily.of(nsa)
        object.__setattr__(nsa, "_gfamily", fam)
    return fam


def _full(k: int) -> int:
    return ((1 << (k + 1)) - 1) & ~1


class _Rules:
    """Constants of one automaton under one construction variant."""

    def __init__(self, nsa: StreettNSA, variant: str):
        if variant not in VARIANTS:
            raise DomainError(f"unknown construction variant {variant!r}")
        self.variant = variant
        self.literal = variant == LITERAL
        self.fam = _family(nsa)
        self.full = _full(nsa.k)
        self.good, self.bad = nsa.good_masks, nsa.bad_masks
        self.guard_bad = 0 if self.literal else self._bad_of(self.fam.cover_mask(0))
        self.guarded = bool(self.guard_bad)
        self._reset = {}

    def _bad_of(self, indices: int) -> int:
        out = 0
        for i in range(1, len(self.bad)):
            if indices >> i & 1:
                out |= self.bad[i]
        return out

    def mini(self, h: int) -> int:
        return self.fam.mini_mask(self.full & ~h)

    def reset_states(self, parent: TreeNode, child: TreeNode, at_root: bool) -> int:
        """States of ``child`` that case b moves to a new sibling."""
        if self.literal:
            j = j_value(child, parent)
            return self.bad[j] if j else 0
        if at_root and self.guarded:
            return self.guard_bad
        key = (parent.h, child.h)
        out = self._reset.get(key)
        if out is None:
            cover = self.fam.cover_mask
            fresh = cover(self.full & ~child.h) & ~cover(self.full & ~parent.h)
            out = self._reset[key] = self._bad_of(fresh)
        return out


def _rules(nsa: StreettNSA, variant: str) -> _Rules:
    cache = nsa.__dict__.get("_rules")
    if cache is None:
        cache = {}
        object.__setattr__(nsa, "_rules", cache)
    rules = cache.get(variant)
    if rules is None:
        rules = cache[variant] = _Rules(nsa, variant)
    return rules


def _spawn(node: TreeNode, rules: _Rules, is_root: bool) -> Optional[TreeNode]:
    """The child step 6 adds below leaf ``node``, or ``None``."""
    if is_root and rules.guarded:
        h = node.h
    else:
        mini = rules.mini(node.h) if node.h else 0
        if not mini:
            return None
        h = node.h & ~(1 << max_index(mini))
    child = TreeNode(node.l, h)
    node.children.append(child)
    return child


def _grow_rounds(root: TreeNode, rules: _Rules, fresh: Callable[[TreeNode], None]):
    """Give every leaf one new child per round until no leaf can grow."""
    leaves = [node for node in preorder(root) if not node.children]
    while leaves:
        grown = []
        for node in leaves:
            child = _spawn(node, rules, node is root)
            if child is not None:
                fresh(child)
                grown.append(child)
        leaves = grown


# ---------------------------------------------------------------------------
# initial trees


def _h_tree(nsa, root, rules):
    return HSafraTree(root, nsa.n, nsa.k, nsa.mu, rules.fam, rules.guarded, rules.variant)


def _mu_tree(nsa, root, rules, e=frozenset(), f=frozenset()):
    return MuSafraTree(root, nsa.n, nsa.k, nsa.mu, e, f, rules.fam, rules.guarded, rules.variant)


def initial_tree(nsa: StreettNSA, mode: str = H_SAFRA, variant: str = CORRECTED):
    """Single branch labelled with the initial states, index labels shrinking
    by the largest Mini index at every level (below the guard, if any)."""
    nsa.require_state_basis()
    rules = _rules(nsa, variant)
    if mode not in (H_SAFRA, LIR, MU):
        raise DomainError(f"unknown tree mode {mode!r}")
    q0 = sum(1 << q for q in nsa.initial)
    root = TreeNode(q0, rules.full)
    made = [root]
    _grow_rounds(root, rules, made.append)
    for stamp, node in enumerate(made):
        node.stamp = stamp
    if mode == H_SAFRA:
        return _h_tree(nsa, root, rules)
    if mode == LIR:
        return LirHSafraTree(_h_tree(nsa, root, rules), made)
    named = made[1:] if rules.guarded else made
    for depth, node in enumerate(named, 1):
        node.name = MuName(1, depth)
    return _mu_tree(nsa, root, rules)


# ---------------------------------------------------------------------------
# the six steps


def _remove_states(node: TreeNode, states: int):
    stack = [node]
    while stack:
        cur = stack.pop()
        if cur.l & states:
            cur.l &= ~states
            stack.extend(cur.children)


class _Scratch:
    """Book-keeping for one transformation of a private tree copy."""

    def __init__(self, root: TreeNode, lir: Optional[List[TreeNode]], next_stamp: int):
        self.root = root
        self.lir = lir
        self.next_stamp = next_stamp
        self.removed: List[TreeNode] = []
        self.accepting: List[TreeNode] = []

    def fresh(self, node: TreeNode):
        node.stamp = self.next_stamp
        self.next_stamp += 1
        if self.lir is not None:
            self.lir.append(node)

    def drop(self, node: TreeNode):
        for gone in preorder(node):
            self.removed.append(gone)


def _transform(nsa: StreettNSA, root: TreeNode, letter: int, mode: str, rules: _Rules,
               lir: Optional[List[TreeNode]] = None, trace=None):
    """Run steps 1 to 4 in place on a private copy ``root``.

    Returns the scratch record (removed nodes, accepting nodes) or ``None``
    when the update empties the root, i.e. the move is dead.
    """
    fam, full, good = rules.fam, rules.full, rules.good
    source = set(preorder(root))
    stamps = max(node.stamp for node in source) + 1
    scratch = _Scratch(root, lir, stamps)

    def emit(step, title):
        if trace is not None:
            trace(step, title, root, lir)

    # 1. update
    for node in preorder(root):
        node.l = nsa.successors(node.l, letter)
    emit(1, "update")
    if root.l == 0:
        return None

    # 2. create siblings, parents visited from the root downwards
    stack = [root]
    while stack:
        parent = stack.pop()
        existing = list(parent.children)
        for child in existing:
            j = j_value(child, parent)
            hit = child.l & good[j] if j else 0
            if hit:
                below = (fam.mini_mask(full & ~parent.h) | 1) & ((1 << j) - 1)
                drop = max_index(below)
                new = TreeNode(hit, parent.h & ~(1 << drop) if drop else parent.h)
                parent.children.append(new)
                scratch.fresh(new)
                _remove_states(child, hit)
            if mode == MU and hit and rules.literal:
                continue
            hit = child.l & rules.reset_states(parent, child, parent is root)
            if hit:
                new = TreeNode(hit, child.h)
                parent.children.append(new)
                scratch.fresh(new)
                _remove_states(child, hit)
        stack.extend(c for c in reversed(existing) if c.children)
    for node in preorder(root):
        if len(node.children) > 1:
            node.children = stor_sort(node.children, node)
    emit(2, "create siblings")

    # 3. horizontal merge, keeper = minimal j then oldest
    for node in preorder(root):
        if len(node.children) > 1:
            claimed = 0
            for child in sorted(node.children, key=lambda c: (j_value(c, node), c.stamp)):
                overlap = child.l & claimed
                claimed |= child.l
                if overlap:
                    _remove_states(child, overlap)
    for node in list(preorder(root)):
        kept = []
        for child in node.children:
            if child.l:
                kept.append(child)
            else:
                scratch.drop(child)
        node.children = kept
    emit(3, "horizontal merge")

    # 4. vertical merge, top-down; a guarding root never merges
    stack = [root]
    while stack:
        node = stack.pop()
        if not node.children:
            if not rules.literal and node in source and not rules.mini(node.h):
                scratch.accepting.append(node)
            continue
        if all(c.h == node.h for c in node.children) and not (node is root and rules.guarded):
            scratch.accepting.append(node)
            for child in node.children:
                scratch.drop(child)
            node.children = []
        else:
            stack.extend(node.children)
    if lir is not None:
        gone = set(map(id, scratch.removed))
        lir[:] = [node for node in lir if id(node) not in gone]
    emit(4, "vertical merge")
    return scratch


def _step6(root: TreeNode, rules: _Rules, scratch: _Scratch):
    _grow_rounds(root, rules, scratch.fresh)


def _sink_root(k: int) -> TreeNode:
    return TreeNode(0, _full(k))


def _mu_sink(nsa, rules, e=frozenset()):
    root = _sink_root(nsa.k)
    if not rules.guarded:
        root.name = MuName(1, 1)
    return _mu_tree(nsa, root, rules, e)


def _checked(tree, mode):
    problems = check_invariants(tree, mode)
    if problems:
        raise InvariantViolation("successor broke tree invariants: " + "; ".join(problems))
    return tree


def h_safra_successor(nsa: StreettNSA, tree: HSafraTree, letter: int, trace=None,
                      check: bool = True) -> SuccessorResult:
    """σ-successor of an H-Safra tree with its accepting/rejecting signature."""
    if not 0 <= letter < nsa.alphabet.size:
        raise DomainError(f"letter {letter} outside the alphabet")
    source_names = assign_names_mn(tree.root)
    rules = _rules(nsa, tree.variant)
    root, mapping = copy_tree(tree.root)
    carried = {mapping[node]: name for node, name in source_names.items()}
    scratch = _transform(nsa, root, letter, H_SAFRA, rules, trace=trace)
    if scratch is None:
        sink = _h_tree(nsa, _sink_root(nsa.k), rules)
        return SuccessorResult(sink, RabinSignature(frozenset(), frozenset(source_names.values())))
    sig_rej = {carried[node] for node in scratch.removed if node in carried}
    sig_acc = {carried[node] for node in scratch.accepting}
    # 5. rename
    for node, name in assign_names_mn(root).items():
        if node in carried and carried[node] != name:
            sig_rej.add(carried[node])
    if trace is not None:
        trace(5, "rename", root, None)
    # 6. create children
    _step6(root, rules, scratch)
    if trace is not None:
        trace(6, "create children", root, None)
    result = _h_tree(nsa, root, rules)
    if check:
        _checked(result, H_SAFRA)
    return SuccessorResult(result, RabinSignature(frozenset(sig_acc), frozenset(sig_rej)))


def lir_successor(nsa: StreettNSA, tree: LirHSafraTree, letter: int, trace=None,
                  check: bool = True) -> SuccessorResult:
    """σ-successor of an LIR-H-Safra tree with its parity signature.

    A source node is rejecting when its record position changes or it is
    removed; the signature reports the event at the least source position,
    rejection winning a tie.  ``None`` stands for "no event".
    """
    if not 0 <= letter < nsa.alphabet.size:
        raise DomainError(f"letter {letter} outside the alphabet")
    rules = _rules(nsa, tree.tree.variant)
    root, mapping = copy_tree(tree.tree.root)
    lir = [mapping[node] for node in tree.lir]
    source_pos = {node: i for i, node in enumerate(lir, 1)}
    for node, pos in source_pos.items():
        node.stamp = pos
    scratch = _transform(nsa, root, letter, LIR, rules, lir=lir, trace=trace)
    if scratch is None:
        sink_root = _sink_root(nsa.k)
        return SuccessorResult(LirHSafraTree(_h_tree(nsa, sink_root, rules), [sink_root]), None)
    _step6(root, rules, scratch)
    if trace is not None:
        trace(6, "create children", root, lir)
    result = LirHSafraTree(_h_tree(nsa, root, rules), lir)
    if check:
        _checked(result, LIR)
    final_pos = {node: i for i, node in enumerate(lir, 1)}
    rejecting = {p for node, p in source_pos.items() if final_pos.get(node) != p}
    accepting = {source_pos[node] for node in scratch.accepting}
    events = rejecting | accepting
    if not events:
        return SuccessorResult(result, None)
    p = min(events)
    return SuccessorResult(result, ParitySignature(REJ if p in rejecting else ACC, p))


def priority_of(sig: Optional[ParitySignature], n: int, mu: int) -> int:
    """(acc, i) -> 2i, (rej, i) -> 2i-1 for i >= 2, no event or (rej, 1) -> 2n(mu+1)+1."""
    top = 2 * n * (mu + 1) + 1
    if sig is None:
        return top
    st, p = sig
    if not 1 <= p <= n * (mu + 1) + 1:
        raise DomainError(f"position {p} outside 1..{n * (mu + 1)}")
    if st == ACC:
        return 2 * p
    if st == REJ:
        return top if p == 1 else 2 * p - 1
    raise DomainError(f"unknown signature status {st!r}")


def mu_safra_successor(nsa: StreettNSA, tree: MuSafraTree, letter: int, trace=None,
                       check: bool = True) -> MuSafraTree:
    """σ-successor of a mu-Safra tree; ``E``/``F`` describe this step only."""
    if not 0 <= letter < nsa.alphabet.size:
        raise DomainError(f"letter {letter} outside the alphabet")
    rules = _rules(nsa, tree.variant)
    root, _ = copy_tree(tree.root)
    for stamp, node in enumerate(preorder(root)):
        node.stamp = stamp
    every = frozenset(node.name for node in preorder(tree.root) if node.name is not None)
    scratch = _transform(nsa, root, letter, MU, rules, trace=trace)
    if scratch is None:
        return _mu_sink(nsa, rules, every)
    e_names = {node.name for node in scratch.removed if node.name is not None}
    f_names = {node.name for node in scratch.accepting}
    events = assign_names_mb(root, nsa.n, defined_only=True, skip_root=rules.guarded)
    e_names.update(old for old, _ in events.renamed)
    if trace is not None:
        trace(5, "rename", root, None)
    _step6(root, rules, scratch)
    assign_names_mb(root, nsa.n, skip_root=rules.guarded)
    if trace is not None:
        trace(6, "create children", root, None)
    # a name both accepted and rejected in one step counts as rejected
    result = _mu_tree(nsa, root, rules, frozenset(e_names), frozenset(f_names - e_names))
    if check:
        _checked(result, MU)
    return result


# ---------------------------------------------------------------------------
# closures


def _explore(nsa, start, successor, key_of, cap):
    if cap < 1:
        raise CapacityError(f"state cap of {cap} exceeded", cap=cap)
    keys = {key_of(start): 0}
    trees = [start]
    rows = []
    queue = deque([0])
    while queue:
        s = queue.popleft()
        row = []
        for a in range(nsa.alphabet.size):
            nxt, label = successor(trees[s], a)
            key = key_of(nxt)
            t = keys.get(key)
            if t is None:
                t = len(trees)
                if t >= cap:
                    raise CapacityError(f"state cap of {cap} exceeded", cap=cap)
                keys[key] = t
                trees.append(nxt)
                queue.append(t)
            row.append((t, label))
        rows.append(row)
    return trees, rows


def _sink_index(trees, root_of):
    for i, tree in enumerate(trees):
        root = root_of(tree)
        if root.l == 0 and not root.children:
            return i
    return None


def _audit(trees, mode, check) -> int:
    """Check every reachable tree once; raise on the first problem when
    ``check``, otherwise return the number of problems found."""
    total = 0
    for tree in trees:
        problems = check_invariants(tree, mode)
        if problems and check:
            raise InvariantViolation("reachable tree breaks invariants: " + "; ".join(problems))
        total += len(problems)
    return total


def _stats(trees, root_of, variant, mode, check):
    guarded = (trees[0].tree if isinstance(trees[0], LirHSafraTree) else trees[0]).guarded
    raw = [node_count(root_of(t)) for t in trees]
    below = [c - 1 if guarded and root_of(t).children else c for c, t in zip(raw, trees)]
    return {
        "max_tree_nodes": max(below),
        "max_tree_nodes_raw": max(raw),
        "variant": variant,
        "guarded": guarded,
        "invariant_violations": _audit(trees, mode, check),
    }


def build_drta(nsa: StreettNSA, cap: int = DEFAULT_STATE_CAP, check: bool = True,
               variant: str = CORRECTED) -> DetTransitionAutomaton:
    """Deterministic Rabin transition automaton over H-Safra trees."""
    start = initial_tree(nsa, H_SAFRA, variant)

    def successor(tree, a):
        res = h_safra_successor(nsa, tree, a, check=False)
        return res.tree, res.signature

    trees, rows = _explore(nsa, start, successor, HSafraTree.key, cap)
    root_of = lambda t: t.root  # noqa: E731
    sink = _sink_index(trees, root_of)
    all_names = frozenset(
        name for row in rows for _, (acc, rej) in row for name in acc | rej
    )
    labels = tuple(
        tuple(
            (frozenset(), all_names) if t == sink else (acc, rej)
            for t, (acc, rej) in row
        )
        for row in rows
    )
    return DetTransitionAutomaton(
        kind=DRTA,
        alphabet=nsa.alphabet,
        states=tuple(canonical_encode(t, H_SAFRA) for t in trees),
        initial=0,
        delta=tuple(tuple(t for t, _ in row) for row in rows),
        labels=labels,
        meta=(nsa.n, nsa.k, nsa.mu),
        sink=sink,
        stats=_stats(trees, root_of, variant, H_SAFRA, check),
    )


def build_dpta(nsa: StreettNSA, cap: int = DEFAULT_STATE_CAP, check: bool = True,
               variant: str = CORRECTED) -> DetTransitionAutomaton:
    """Deterministic parity transition automaton over LIR-H-Safra trees."""
    start = initial_tree(nsa, LIR, variant)

    def successor(tree, a):
        res = lir_successor(nsa, tree, a, check=False)
        return res.tree, res.signature

    trees, rows = _explore(nsa, start, successor, LirHSafraTree.key, cap)
    root_of = lambda t: t.tree.root  # noqa: E731
    sink = _sink_index(trees, root_of)
    top = 2 * nsa.n * (nsa.mu + 1) + 1
    labels = tuple(
        tuple(top if t == sink else priority_of(sig, nsa.n, nsa.mu) for t, sig in row)
        for row in rows
    )
    stats = _stats(trees, root_of, variant, LIR, check)
    stats["root_rejections"] = sum(
        1 for row in rows for t, sig in row if sig is not None and sig.st == REJ and sig.p == 1
    )
    return DetTransitionAutomaton(
        kind=DPTA,
        alphabet=nsa.alphabet,
        states=tuple(canonical_encode(t, LIR) for t in trees),
        initial=0,
        delta=tuple(tuple(t for t, _ in row) for row in rows),
        labels=labels,
        meta=(nsa.n, nsa.k, nsa.mu),
        sink=sink,
        stats=stats,
    )


def build_dra(nsa: StreettNSA, cap: int = DEFAULT_STATE_CAP, check: bool = True,
               variant: str = CORRECTED) -> DetTransitionAutomaton:
    """State-based deterministic Rabin automaton over mu-Safra trees.

    Pair ``N`` accepts at trees with ``N`` in ``F`` and rejects at trees with
    ``N`` in ``E``.
    """
    start = initial_tree(nsa, MU, variant)

    sink_tree = _mu_sink(nsa, _rules(nsa, variant))

    def successor(tree, a):
        nxt = mu_safra_successor(nsa, tree, a, check=False)
        # one absorbing sink state whatever names the dying tree carried
        return (sink_tree if nxt.root.l == 0 else nxt), None

    trees, rows = _explore(nsa, start, successor, MuSafraTree.key, cap)
    root_of = lambda t: t.root  # noqa: E731
    sink = _sink_index(trees, root_of)
    all_names = frozenset(name for t in trees for name in t.E | t.F)
    state_labels = tuple(
        (frozenset(), all_names) if i == sink else (t.F, t.E) for i, t in enumerate(trees)
    )
    stats = _stats(trees, root_of, variant, MU, check)
    # trees reached with different markers are different states
    stats["live_trees"] = len(
        {canonical_encode(t, MU).rsplit(b"|", 2)[0] for i, t in enumerate(trees) if i != sink}
    )
    return DetTransitionAutomaton(
        kind=DRA,
        alphabet=nsa.alphabet,
        states=tuple(canonical_encode(t, MU) for t in trees),
        initial=0,
        delta=tuple(tuple(t for t, _ in row) for row in rows),
        labels=tuple(tuple(None for _ in row) for row in rows),
        meta=(nsa.n, nsa.k, nsa.mu),
        sink=sink,
        state_labels=state_labels,
        stats=stats,
    )


BUILDERS = {DRTA: build_drta, DPTA: build_dpta, DRA: build_dra}


def reachable_trees(nsa: StreettNSA, mode: str, cap: int = DEFAULT_STATE_CAP,
                    variant: str = CORRECTED):
    """All trees reachable from the initial tree, in exploration order."""
    start = initial_tree(nsa, mode, variant)
    if mode == H_SAFRA:
        succ = lambda t, a: (h_safra_successor(nsa, t, a).tree, None)  # noqa: E731
        key = HSafraTree.key
    elif mode == LIR:
        succ = lambda t, a: (lir_successor(nsa, t, a).tree, None)  # noqa: E731
        key = LirHSafraTree.key
    else:
        succ = lambda t, a: (mu_safra_successor(nsa, t, a), None)  # noqa: E731
        key = MuSafraTree.key
    trees, _ = _explore(nsa, start, succ, key, cap)
    return trees
