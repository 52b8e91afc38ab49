"""Labelled ordered trees used as determinized states.

A node carries a state label ``l`` and an index label ``h``, both int
bitmasks (bit ``q`` for state ``q``; bit ``i`` for pair index ``i``).  Three
flavours share the node type:

* ``HSafraTree``: names are derived from structure (:func:`assign_names_mn`)
  and never stored;
* ``LirHSafraTree``: adds the later introduction record, the creation order
  of the nodes;
* ``MuSafraTree``: explicit batch-mode names ``bucket.depth`` plus the
  marker sets ``E`` and ``F``.
"""
from __future__ import annotations

import logging
from dataclasses import dataclass, field
from typing import Dict, List, Optional

from .errors import DomainError, InvariantViolation
from .indices import GFamily, from_mask, max_index
from .omega import MuName, format_name, parse_name

log = logging.getLogger(__name__)

H_SAFRA = "h-safra"
LIR = "lir"
MU = "mu"

# construction variants, see determinize
CORRECTED = "corrected"
LITERAL = "literal"
VARIANTS = (CORRECTED, LITERAL)


class TreeNode:
    __slots__ = ("l", "h", "children", "stamp", "name")

    def __init__(self, l: int, h: int, children=None, stamp: int = 0, name=None):
        self.l = l
        self.h = h
        self.children: List[TreeNode] = children if children is not None else []
        self.stamp = stamp
        self.name = name

    def __repr__(self):
        return f"TreeNode(l={sorted(from_mask(self.l))}, h={sorted(from_mask(self.h))})"

    def is_leaf(self) -> bool:
        return not self.children


def preorder(root: TreeNode):
    stack = [root]
    while stack:
        node = stack.pop()
        yield node
        stack.extend(reversed(node.children))


def preorder_with_parent(root: TreeNode):
    stack = [(root, None)]
    while stack:
        node, parent = stack.pop()
        yield node, parent
        stack.extend((c, node) for c in reversed(node.children))


def j_value(node: TreeNode, parent: Optional[TreeNode]) -> int:
    """Largest index of ``h(parent) | {0}`` missing from ``h(node)``."""
    if parent is None:
        raise DomainError("the root has no j-value")
    return max_index((parent.h | 1) & ~node.h)


def stor_sort(siblings, parent: TreeNode) -> list:
    """Descending j; equal j keeps the given (older-first) order."""
    return sorted(siblings, key=lambda c: -j_value(c, parent))


def node_count(root: TreeNode) -> int:
    return sum(1 for _ in preorder(root))


def assign_names_mn(root: TreeNode) -> Dict[TreeNode, tuple]:
    """Structural names: the root is ε, every other node extends its parent's
    name by ``j^occ`` where ``occ - 1`` counts equal-j left siblings."""
    names = {root: ()}
    stack = [root]
    while stack:
        node = stack.pop()
        base = names[node]
        seen: Dict[int, int] = {}
        for child in node.children:
            j = j_value(child, node)
            seen[j] = seen.get(j, 0) + 1
            names[child] = base + ((j, seen[j]),)
            stack.append(child)
    return names


def copy_tree(root: TreeNode):
    """Deep copy; returns the new root and a map old node -> new node."""
    mapping = {}

    def rec(node):
        new = TreeNode(node.l, node.h, [], node.stamp, node.name)
        mapping[node] = new
        new.children = [rec(c) for c in node.children]
        return new

    return rec(root), mapping


@dataclass
class HSafraTree:
    root: TreeNode
    n: int
    k: int
    mu: int
    fam: Optional[GFamily] = field(default=None, compare=False, repr=False)
    guarded: bool = field(default=False, compare=False)
    variant: str = field(default=CORRECTED, compare=False)

    def key(self):
        return _shape_key(self.root)

    def names(self):
        return assign_names_mn(self.root)


@dataclass
class LirHSafraTree:
    tree: HSafraTree
    lir: List[TreeNode]

    def key(self):
        order = _preorder_index(self.tree.root)
        return (_shape_key(self.tree.root), tuple(order[node] for node in self.lir))

    def position(self, node: TreeNode) -> int:
        """1-based position of ``node`` in the record."""
        return self.lir.index(node) + 1


@dataclass
class MuSafraTree:
    root: TreeNode
    n: int
    k: int
    mu: int
    E: frozenset = frozenset()
    F: frozenset = frozenset()
    fam: Optional[GFamily] = field(default=None, compare=False, repr=False)
    guarded: bool = field(default=False, compare=False)
    variant: str = field(default=CORRECTED, compare=False)

    def key(self):
        names = tuple(tuple(node.name) if node.name else None for node in preorder(self.root))
        return (
            _shape_key(self.root),
            names,
            tuple(sorted(self.E)),
            tuple(sorted(self.F)),
        )

    def free_buckets(self) -> List[int]:
        used = {node.name.bucket for node in preorder(self.root) if node.name}
        return [b for b in range(1, self.n + 1) if b not in used]


def _shape_key(root: TreeNode):
    return tuple((node.l, node.h, len(node.children)) for node in preorder(root))


def _preorder_index(root: TreeNode):
    return {node: i for i, node in enumerate(preorder(root))}


# ---------------------------------------------------------------------------
# canonical encoding


def canonical_encode(tree, mode: Optional[str] = None) -> bytes:
    """Injective, run-independent byte encoding of a tree.

    ``mode`` defaults to the tree's own flavour; an LIR tree encoded in
    ``h-safra`` mode drops its record.
    """
    if mode is None:
        mode = MU if isinstance(tree, MuSafraTree) else LIR if isinstance(tree, LirHSafraTree) else H_SAFRA
    if isinstance(tree, LirHSafraTree):
        root = tree.tree.root
    else:
        root = tree.root
    nodes = ";".join(f"{n.l:x},{n.h:x},{len(n.children)}" for n in preorder(root))
    if mode == H_SAFRA:
        return f"H:{nodes}".encode("ascii")
    if mode == LIR:
        order = _preorder_index(root)
        lir = ",".join(str(order[node]) for node in tree.lir)
        return f"L:{nodes}|{lir}".encode("ascii")
    if mode == MU:
        names = ",".join(format_name(n.name) if n.name else "?" for n in preorder(root))
        e = ",".join(format_name(x) for x in sorted(tree.E))
        f = ",".join(format_name(x) for x in sorted(tree.F))
        return f"M:{nodes}|{names}|E={e}|F={f}".encode("ascii")
    raise DomainError(f"unknown tree mode {mode!r}")


def decode_tree(data: bytes, n: int = 0, k: int = 0, mu: int = 0):
    """Inverse of :func:`canonical_encode`."""
    text = data.decode("ascii")
    tag, body = text.split(":", 1)
    parts = body.split("|")
    records = [tuple(r.split(",")) for r in parts[0].split(";")]
    nodes = [TreeNode(int(l, 16), int(h, 16)) for l, h, _ in records]
    counts = [int(c) for _, _, c in records]
    pos = 1

    def attach(i):
        nonlocal pos
        for _ in range(counts[i]):
            child = pos
            pos += 1
            nodes[i].children.append(nodes[child])
            attach(child)

    attach(0)
    for stamp, node in enumerate(nodes):
        node.stamp = stamp
    root = nodes[0]
    # only a guarding root keeps children with its own index label
    guarded = bool(root.children) and all(c.h == root.h for c in root.children)
    if tag == "H":
        return HSafraTree(root, n, k, mu, guarded=guarded)
    if tag == "L":
        lir = [nodes[int(i)] for i in parts[1].split(",")]
        for stamp, node in enumerate(lir):
            node.stamp = stamp
        return LirHSafraTree(HSafraTree(root, n, k, mu, guarded=guarded), lir)
    if tag == "M":
        for node, name in zip(nodes, parts[1].split(",")):
            node.name = None if name == "?" else parse_name(name)
        e = frozenset(parse_name(x) for x in parts[2][2:].split(",") if x)
        f = frozenset(parse_name(x) for x in parts[3][2:].split(",") if x)
        # a guarded automaton never names its root, not even the sink
        guarded = guarded or root.name is None
        return MuSafraTree(root, n, k, mu, e, f, guarded=guarded)
    raise DomainError(f"unknown encoding tag {tag!r}")


# ---------------------------------------------------------------------------
# batch-mode names


def left_spines(root: TreeNode, skip_root: bool = False) -> List[List[TreeNode]]:
    """Maximal left-most-child chains, listed in preorder of their heads.

    With ``skip_root`` the root is left out and its children head spines.
    """
    spines = []
    for node, parent in preorder_with_parent(root):
        if skip_root and parent is None:
            continue
        if parent is not None and parent.children[0] is node and not (skip_root and parent is root):
            continue
        spine = [node]
        while spine[-1].children:
            spine.append(spine[-1].children[0])
        spines.append(spine)
    return spines


@dataclass
class MbEvents:
    renamed: list = field(default_factory=list)  # (old name, new name)
    grafts: list = field(default_factory=list)  # (grafted bucket, host bucket, host length)
    created: list = field(default_factory=list)  # buckets of new spines
    released: list = field(default_factory=list)


def assign_names_mb(root: TreeNode, n: int, defined_only: bool = False,
                    skip_root: bool = False) -> MbEvents:
    """Apply the batch-mode (re)naming rules to the current tree shape.

    A spine whose head already holds ``b.1`` keeps bucket ``b``; nodes on it
    that do not hold ``b.depth`` are renamed (a graft when they arrive from
    another spine, whose bucket is then recycled).  Spines with an unnamed
    head take the lowest free bucket, unless ``defined_only`` is set, in
    which case unnamed nodes are left alone.  ``skip_root`` keeps a guarding
    root out of the naming.
    """
    events = MbEvents()
    spines = left_spines(root, skip_root)
    before = {node.name.bucket for node in preorder(root) if node.name}
    kept = {}
    for spine in spines:
        head = spine[0].name
        if head is not None and head.depth == 1 and head.bucket not in kept:
            kept[head.bucket] = spine
    fresh = [s for s in spines if not any(s is v for v in kept.values())]
    used = set(kept)

    def place(spine, bucket):
        for depth, node in enumerate(spine, 1):
            target = MuName(bucket, depth)
            if node.name is None:
                if not defined_only:
                    node.name = target
                continue
            if node.name != target:
                if node.name.depth == 1 and node.name.bucket != bucket:
                    events.grafts.append((node.name.bucket, bucket, depth - 1))
                    log.debug("graft spine %d onto spine %d below depth %d",
                              node.name.bucket, bucket, depth - 1)
                events.renamed.append((node.name, target))
                node.name = target

    for bucket, spine in kept.items():
        place(spine, bucket)
    for spine in fresh:
        if defined_only and all(node.name is None for node in spine):
            continue
        free = [b for b in range(1, n + 1) if b not in used]
        if not free:
            raise InvariantViolation(f"more than {n} left spines: no free name bucket")
        bucket = free[0]
        used.add(bucket)
        events.created.append(bucket)
        place(spine, bucket)
    events.released = sorted(before - used)
    return events


# ---------------------------------------------------------------------------
# invariants


def check_invariants(tree, mode: Optional[str] = None, fam: Optional[GFamily] = None) -> List[str]:
    """Return a list of violations; empty when the tree is well formed."""
    if mode is None:
        mode = MU if isinstance(tree, MuSafraTree) else LIR if isinstance(tree, LirHSafraTree) else H_SAFRA
    base = tree.tree if isinstance(tree, LirHSafraTree) else tree
    root, n, mu = base.root, base.n, base.mu
    fam = fam or base.fam
    full = ((1 << (base.k + 1)) - 1) & ~1
    guarded = getattr(base, "guarded", False)
    out = []
    names = assign_names_mn(root)

    def where(node):
        return names[node] and format_name(names[node]) or "ε"

    if root.h != full:
        out.append(f"{where(root)}: root index label is not [k]")
    sink = root.l == 0 and not root.children
    count = 0
    for node, parent in preorder_with_parent(root):
        count += 1
        if node.l >> n:
            out.append(f"{where(node)}: state label outside 0..{n - 1}")
        if node.l == 0 and not sink:
            out.append(f"{where(node)}: empty state label")
        if parent is not None:
            if node.h & ~parent.h:
                out.append(f"{where(node)}: index label not contained in parent's")
            elif bin(parent.h & ~node.h).count("1") > 1:
                out.append(f"{where(node)}: index label misses more than one parental index")
        if node.children:
            union = 0
            for i, child in enumerate(node.children):
                if union & child.l:
                    out.append(f"{where(child)}: state label overlaps a sibling")
                union |= child.l
                if i and j_value(child, node) > j_value(node.children[i - 1], node):
                    out.append(f"{where(child)}: siblings violate structural order")
            if union != node.l:
                out.append(f"{where(node)}: state label differs from union of children")
            if guarded and parent is None:
                if any(c.h != node.h for c in node.children):
                    out.append(f"{where(node)}: guarding root has a child with a smaller index label")
            elif all(c.h == node.h for c in node.children):
                out.append(f"{where(node)}: no child with strictly smaller index label")
        elif guarded and parent is None and not sink:
            out.append(f"{where(node)}: guarding root without children")
        elif fam is not None and not sink and node.h and fam.mini_mask(full & ~node.h):
            out.append(f"{where(node)}: leaf can still spawn a child")
    if guarded and not sink:
        count -= 1
    if count > n * (mu + 1):
        out.append(f"tree has {count} nodes below any guard, more than n(mu+1) = {n * (mu + 1)}")
    if len(set(names.values())) != len(names):
        out.append("structural names are not pairwise distinct")
    if assign_names_mn(root) != names:
        out.append("structural naming is not idempotent")

    if mode == LIR:
        lir = tree.lir
        nodes = list(preorder(root))
        if len(lir) != len(nodes) or set(map(id, lir)) != set(map(id, nodes)):
            out.append("later introduction record is not a bijection with the nodes")
        else:
            pos = {id(node): i for i, node in enumerate(lir)}
            if lir[0] is not root:
                out.append("root is not first in the later introduction record")
            for node in nodes:
                for child in node.children:
                    if pos[id(child)] < pos[id(node)]:
                        out.append(f"{where(child)}: recorded before its parent")
                ordered = node.children
                for a, b in zip(ordered, ordered[1:]):
                    if j_value(a, node) == j_value(b, node) and pos[id(a)] > pos[id(b)]:
                        out.append(f"{where(b)}: equal-j sibling order disagrees with record")
    if mode == MU:
        spines = left_spines(root, skip_root=guarded)
        if guarded and root.name is not None:
            out.append("guarding root carries a name")
        if len(spines) > n:
            out.append(f"{len(spines)} left spines, more than n = {n}")
        seen = set()
        for spine in spines:
            if len(spine) > mu + 1:
                out.append(f"left spine of length {len(spine)} exceeds mu+1 = {mu + 1}")
            head = spine[0].name
            for depth, node in enumerate(spine, 1):
                name = node.name
                if name is None:
                    out.append(f"{where(node)}: unnamed node")
                    continue
                if name in seen:
                    out.append(f"name {format_name(name)} used twice")
                seen.add(name)
                if not (1 <= name.bucket <= n and 1 <= name.depth <= mu + 1):
                    out.append(f"name {format_name(name)} outside [n].[mu+1]")
                if head is not None and name != MuName(head.bucket, depth):
                    out.append(f"name {format_name(name)} disagrees with its spine position")
        if tree.E & tree.F:
            out.append("marker sets E and F intersect")
    return out


def render_tree(tree, names=None) -> str:
    """Indented debug rendering: one line per node with l, h, j and name."""
    if isinstance(tree, LirHSafraTree):
        positions = {id(node): i for i, node in enumerate(tree.lir, 1)}
        root = tree.tree.root
    else:
        positions = {}
        root = tree.root if hasattr(tree, "root") else tree
    if names is None:
        names = assign_names_mn(root)
    lines = []

    def rec(node, parent, depth):
        j = "-" if parent is None else j_value(node, parent)
        label = node.name if node.name is not None and isinstance(node.name, MuName) else names.get(node)
        text = "?" if label is None else format_name(label)
        extra = f" p={positions[id(node)]}" if id(node) in positions else ""
        lines.append(
            f"{'  ' * depth}{text} l={{{','.join(map(str, sorted(from_mask(node.l))))}}}"
            f" h={{{','.join(map(str, sorted(from_mask(node.h))))}}} j={j}{extra}"
        )
        for child in node.children:
            rec(child, node, depth + 1)

    rec(root, None, 0)
    if isinstance(tree, MuSafraTree):
        lines.append(f"E={{{','.join(format_name(x) for x in sorted(tree.E))}}}"
                     f" F={{{','.join(format_name(x) for x in sorted(tree.F))}}}")
    return "\n".join(lines)
