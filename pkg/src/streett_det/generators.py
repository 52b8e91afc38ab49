"""Seeded instance generation, full Streett automata and lasso enumeration."""
from __future__ import annotations

import itertools
import random
from dataclasses import dataclass
from typing import Iterator, Optional, Sequence

from .errors import CapacityError, DomainError
from .omega import STATE, TRANSITION, Alphabet, Lasso, StreettNSA


@dataclass(frozen=True)
class GenSpec:
    n: int
    k: int
    sigma: int = 2
    density: float = 0.5
    pair_density: float = 0.3
    seed: int = 0

    def __post_init__(self):
        if self.n < 1 or self.k < 0 or self.sigma < 1:
            raise DomainError(f"invalid generator spec {self}")
        if not 0 < self.density <= 1 or not 0 <= self.pair_density <= 1:
            raise DomainError(f"densities out of range in {self}")


def random_nsa(spec: GenSpec) -> StreettNSA:
    """A random state-based NSA, a pure function of ``spec``."""
    rng = random.Random(f"nsa:{spec.n}:{spec.k}:{spec.sigma}:{spec.density}:{spec.pair_density}:{spec.seed}")
    transitions = frozenset(
        (p, a, q)
        for p in range(spec.n)
        for a in range(spec.sigma)
        for q in range(spec.n)
        if rng.random() < spec.density
    )
    initial = frozenset(q for q in range(spec.n) if rng.random() < 0.5) or frozenset({0})
    pairs = []
    for _ in range(spec.k):
        good = frozenset(q for q in range(spec.n) if rng.random() < spec.pair_density)
        bad = frozenset(q for q in range(spec.n) if rng.random() < spec.pair_density)
        pairs.append((good, bad))
    return StreettNSA(spec.n, Alphabet(spec.sigma), initial, transitions, tuple(pairs), STATE)


# ---------------------------------------------------------------------------
# full Streett automata
#
# A letter is a set of marked edges (p, mark, q).  Marks are encoded as
# 0 for the empty mark, i for G_i and k+i for B_i.  Letter number x holds
# the triple with bit index (p*(2k+1) + mark)*n + q.

MAX_EXPLICIT_BITS = 16


def mark_name(mark: int, k: int) -> str:
    if mark == 0:
        return "-"
    return f"G{mark}" if mark <= k else f"B{mark - k}"


class FullStreettFamily:
    """Lazily enumerable alphabet of the full Streett automaton on ``n`` states."""

    def __init__(self, n: int, k: int):
        if n < 1 or k < 1:
            raise DomainError("full Streett automata need n >= 1 and k >= 1")
        self.n, self.k = n, k
        self.marks = 2 * k + 1
        self.bits = n * self.marks * n

    @property
    def alphabet_size(self) -> int:
        return 1 << self.bits

    def bit(self, p: int, mark: int, q: int) -> int:
        return (p * self.marks + mark) * self.n + q

    def letter(self, index: int) -> frozenset:
        """The marked-edge set of letter ``index``."""
        out = []
        for p in range(self.n):
            for mark in range(self.marks):
                for q in range(self.n):
                    if index >> self.bit(p, mark, q) & 1:
                        out.append((p, mark, q))
        return frozenset(out)

    def letter_index(self, triples) -> int:
        return sum(1 << self.bit(p, m, q) for p, m, q in set(triples))

    def letters(self) -> Iterator[int]:
        return iter(range(self.alphabet_size))

    def sample(self, count: int, seed: int = 0):
        """``count`` distinct letters, sorted, drawn with a seeded generator."""
        rng = random.Random(f"full:{self.n}:{self.k}:{seed}")
        if count >= self.alphabet_size:
            return list(range(self.alphabet_size))
        return sorted(rng.sample(range(self.alphabet_size), count))

    def restrict(self, letters: Sequence[int]) -> StreettNSA:
        """The full automaton with its alphabet cut down to ``letters``
        (re-indexed ``0..len-1``); pairs are transition-based."""
        transitions = set()
        good = [set() for _ in range(self.k)]
        bad = [set() for _ in range(self.k)]
        for a, x in enumerate(letters):
            for p, mark, q in self.letter(x):
                t = (p, a, q)
                transitions.add(t)
                if 1 <= mark <= self.k:
                    good[mark - 1].add(t)
                elif mark > self.k:
                    bad[mark - self.k - 1].add(t)
        names = tuple(f"x{x}" for x in letters)
        return StreettNSA(
            self.n,
            Alphabet(len(letters), names),
            frozenset(range(self.n)),
            frozenset(transitions),
            tuple((frozenset(g), frozenset(b)) for g, b in zip(good, bad)),
            TRANSITION,
        )


def full_streett(n: int, k: int, lazy: bool = False, max_bits: int = MAX_EXPLICIT_BITS):
    """The full Streett automaton: every state initial, alphabet all sets of
    marked edges.  Explicit mode materializes every letter; ``lazy`` returns
    a :class:`FullStreettFamily` to sample from instead."""
    family = FullStreettFamily(n, k)
    if lazy:
        return family
    if family.bits > max_bits:
        raise CapacityError(
            f"full_streett({n},{k}) has 2^{family.bits} letters, above the explicit "
            f"guard of 2^{max_bits}; use lazy=True (CLI: --letters)",
            cap=max_bits,
        )
    return family.restrict(range(family.alphabet_size))


def to_state_based(nsa: StreettNSA, cap: int = 10_000) -> StreettNSA:
    """Mark splitting: each state remembers the marks of the transition that
    entered it; initial states carry no marks."""
    if nsa.basis == STATE:
        return nsa
    k = nsa.k
    marks_of = {}
    for t in nsa.transitions:
        marks = frozenset(
            [("G", i) for i, (g, _) in enumerate(nsa.pairs) if t in g]
            + [("B", i) for i, (_, b) in enumerate(nsa.pairs) if t in b]
        )
        marks_of[t] = marks
    start = [(q, frozenset()) for q in sorted(nsa.initial)]
    index = {v: i for i, v in enumerate(start)}
    order = list(start)
    transitions = set()
    i = 0
    while i < len(order):
        q, _ = src = order[i]
        i += 1
        for a in range(nsa.alphabet.size):
            for d in nsa.post[q][a]:
                dst = (d, marks_of[(q, a, d)])
                if dst not in index:
                    if len(order) >= cap:
                        raise CapacityError(f"mark splitting exceeds {cap} states", cap=cap)
                    index[dst] = len(order)
                    order.append(dst)
                transitions.add((index[src], a, index[dst]))
    pairs = tuple(
        (
            frozenset(index[v] for v in order if ("G", i) in v[1]),
            frozenset(index[v] for v in order if ("B", i) in v[1]),
        )
        for i in range(k)
    )
    return StreettNSA(
        len(order),
        nsa.alphabet,
        frozenset(range(len(start))),
        frozenset(transitions),
        pairs,
        STATE,
    )


def enumerate_lassos(alphabet_size: int, max_prefix: int, max_cycle: int) -> Iterator[Lasso]:
    """Every lasso with ``|u| <= max_prefix`` and ``1 <= |v| <= max_cycle``.

    Order: total length, then prefix length, then prefix and cycle
    lexicographically, so the first hit of any search is a shortest one.
    """
    if max_cycle < 1:
        raise DomainError("max_cycle must be at least 1")
    letters = range(alphabet_size)
    for total in range(1, max_prefix + max_cycle + 1):
        for plen in range(0, min(max_prefix, total - 1) + 1):
            clen = total - plen
            if clen > max_cycle:
                continue
            for u in itertools.product(letters, repeat=plen):
                for v in itertools.product(letters, repeat=clen):
                    yield Lasso(u, v)


def sample_lassos(alphabet_size: int, max_prefix: int, max_cycle: int, count: int,
                  seed: Optional[int] = 0):
    """``count`` seeded random lassos within the given length limits."""
    rng = random.Random(f"lasso:{alphabet_size}:{max_prefix}:{max_cycle}:{seed}")
    out = []
    for _ in range(count):
        u = tuple(rng.randrange(alphabet_size) for _ in range(rng.randint(0, max_prefix)))
        v = tuple(rng.randrange(alphabet_size) for _ in range(rng.randint(1, max_cycle)))
        out.append(Lasso(u, v))
    return out
