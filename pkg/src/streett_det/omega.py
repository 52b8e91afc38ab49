"""Core automaton types and acceptance evaluation on run cycles.

States are dense integers ``0..n-1`` and letters dense integers
``0..size-1``.  Streett pairs are either state-based (``G``/``B`` are sets of
states) or transition-based (sets of ``(src, letter, dst)`` triples); one
automaton never mixes the two.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from functools import cached_property
from typing import FrozenSet, Iterable, NamedTuple, Optional, Tuple

from .errors import BasisError, DomainError

STATE = "state"
TRANSITION = "transition"

Transition = Tuple[int, int, int]


@dataclass(frozen=True)
class Alphabet:
    size: int
    names: Optional[Tuple[str, ...]] = None

    def __post_init__(self):
        if self.size < 1:
            raise DomainError(f"alphabet size must be positive, got {self.size}")
        if self.names is not None:
            if len(self.names) != self.size:
                raise DomainError("one display name per letter is required")
            if len(set(self.names)) != self.size:
                raise DomainError("letter display names must be unique")

    def name(self, letter: int) -> str:
        return self.names[letter] if self.names else str(letter)

    def index(self, token) -> int:
        """Resolve a display name or an integer-like token to a letter index."""
        if self.names and token in self.names:
            return self.names.index(token)
        try:
            letter = int(token)
        except (TypeError, ValueError):
            raise DomainError(f"unknown letter {token!r}") from None
        if not 0 <= letter < self.size:
            raise DomainError(f"letter {letter} outside alphabet of size {self.size}")
        return letter


@dataclass(frozen=True)
class StreettNSA:
    n: int
    alphabet: Alphabet
    initial: FrozenSet[int]
    transitions: FrozenSet[Transition]
    pairs: Tuple[Tuple[frozenset, frozenset], ...] = ()
    basis: str = STATE

    def __post_init__(self):
        if self.n < 1:
            raise DomainError("an automaton needs at least one state")
        if not self.initial:
            raise DomainError("the set of initial states must be nonempty")
        if self.basis not in (STATE, TRANSITION):
            raise DomainError(f"unknown pair basis {self.basis!r}")
        for q in self.initial:
            self._check_state(q)
        for t in self.transitions:
            self._check_transition(t)
        for i, (good, bad) in enumerate(self.pairs, 1):
            for member in (*good, *bad):
                if self.basis == STATE:
                    if not isinstance(member, int):
                        raise BasisError(f"pair {i}: {member!r} is not a state")
                    self._check_state(member)
                else:
                    if not isinstance(member, tuple) or member not in self.transitions:
                        raise BasisError(f"pair {i}: {member!r} is not a transition of the automaton")

    def _check_state(self, q):
        if not (isinstance(q, int) and 0 <= q < self.n):
            raise DomainError(f"state {q!r} outside 0..{self.n - 1}")

    def _check_transition(self, t):
        src, letter, dst = t
        self._check_state(src)
        self._check_state(dst)
        if not 0 <= letter < self.alphabet.size:
            raise DomainError(f"letter {letter} outside alphabet in transition {t}")

    @property
    def k(self) -> int:
        return len(self.pairs)

    @property
    def mu(self) -> int:
        return min(self.n, self.k)

    @cached_property
    def post(self) -> Tuple[Tuple[Tuple[int, ...], ...], ...]:
        """``post[q][a]`` is the sorted tuple of ``a``-successors of ``q``."""
        table = [[[] for _ in range(self.alphabet.size)] for _ in range(self.n)]
        for src, letter, dst in sorted(self.transitions):
            table[src][letter].append(dst)
        return tuple(tuple(tuple(row) for row in per_state) for per_state in table)

    @cached_property
    def post_mask(self) -> Tuple[Tuple[int, ...], ...]:
        """Bitmask variant of :attr:`post`."""
        return tuple(
            tuple(sum(1 << d for d in dests) for dests in per_state) for per_state in self.post
        )

    def successors(self, states_mask: int, letter: int) -> int:
        out = 0
        row = self.post_mask
        while states_mask:
            low = states_mask & -states_mask
            out |= row[low.bit_length() - 1][letter]
            states_mask ^= low
        return out

    @cached_property
    def good_masks(self) -> Tuple[int, ...]:
        """``G_i`` as state bitmasks, index 0 unused so that ``good_masks[i]`` is ``G_i``."""
        self.require_state_basis()
        return (0,) + tuple(sum(1 << q for q in g) for g, _ in self.pairs)

    @cached_property
    def bad_masks(self) -> Tuple[int, ...]:
        self.require_state_basis()
        return (0,) + tuple(sum(1 << q for q in b) for _, b in self.pairs)

    def require_state_basis(self):
        if self.basis != STATE:
            raise BasisError("operation needs state-based Streett pairs; convert with to_state_based")


class Lasso(NamedTuple):
    """The ultimately periodic word ``prefix . cycle^omega``."""

    prefix: Tuple[int, ...]
    cycle: Tuple[int, ...]

    @classmethod
    def of(cls, prefix: Iterable[int], cycle: Iterable[int]) -> "Lasso":
        lasso = cls(tuple(prefix), tuple(cycle))
        if not lasso.cycle:
            raise DomainError("lasso cycle must be nonempty")
        return lasso

    def letters(self) -> FrozenSet[int]:
        return frozenset(self.prefix) | frozenset(self.cycle)


@dataclass(frozen=True)
class CycleSummary:
    """What a run visits infinitely often.

    ``states`` may be ``None`` when only transitions are known.
    """

    transitions: frozenset
    states: Optional[frozenset] = None
    priorities: Tuple[int, ...] = ()


def evaluate_streett(cycle: CycleSummary, pairs, basis: str = STATE) -> bool:
    """All pairs hold: the cycle meets ``G_i`` or avoids ``B_i``."""
    if basis == STATE:
        if cycle.states is None:
            raise BasisError("state-based pairs need the visited state set")
        visited = cycle.states
    elif basis == TRANSITION:
        visited = cycle.transitions
    else:
        raise BasisError(f"unknown basis {basis!r}")
    return all(not visited.isdisjoint(good) or visited.isdisjoint(bad) for good, bad in pairs)


def evaluate_rabin(cycle: CycleSummary, pairs, basis: str = TRANSITION) -> bool:
    """Some pair holds: the cycle meets ``A`` and avoids ``R``."""
    if basis == STATE:
        if cycle.states is None:
            raise BasisError("state-based pairs need the visited state set")
        visited = cycle.states
    else:
        visited = cycle.transitions
    return any(not visited.isdisjoint(acc) and visited.isdisjoint(rej) for acc, rej in pairs)


def evaluate_parity(cycle: CycleSummary) -> bool:
    """Min-even parity: the least priority seen infinitely often is even."""
    if not cycle.priorities:
        raise DomainError("parity evaluation needs at least one priority")
    return min(cycle.priorities) % 2 == 0


DRTA = "drta"
DPTA = "dpta"
DRA = "dra"


@dataclass(frozen=True)
class DetTransitionAutomaton:
    """A complete deterministic automaton produced by determinization.

    ``labels[s][a]`` is, per ``kind``:

    * ``drta``: ``(acc_names, rej_names)`` frozensets of node names;
    * ``dpta``: an integer priority;
    * ``dra``: unused (``None``); acceptance sits on states in
      ``state_labels[s] = (F_names, E_names)``.
    """

    kind: str
    alphabet: Alphabet
    states: Tuple[bytes, ...]
    initial: int
    delta: Tuple[Tuple[int, ...], ...]
    labels: Tuple[Tuple[object, ...], ...]
    meta: Tuple[int, int, int]
    sink: Optional[int] = None
    state_labels: Optional[Tuple[Tuple[frozenset, frozenset], ...]] = None
    stats: dict = field(default_factory=dict, compare=False, hash=False, repr=False)

    def __post_init__(self):
        if self.kind not in (DRTA, DPTA, DRA):
            raise DomainError(f"unknown automaton kind {self.kind!r}")
        m = len(self.states)
        if not 0 <= self.initial < m:
            raise DomainError("initial state out of range")
        if len(self.delta) != m or any(len(row) != self.alphabet.size for row in self.delta):
            raise DomainError("transition table must be total")
        if any(not 0 <= d < m for row in self.delta for d in row):
            raise DomainError("transition target out of range")
        if self.kind == DRA and (self.state_labels is None or len(self.state_labels) != m):
            raise DomainError("state-based Rabin automaton needs one label per state")

    @property
    def num_states(self) -> int:
        return len(self.states)

    @property
    def num_live_states(self) -> int:
        return self.num_states - (self.sink is not None)

    @property
    def top_priority(self) -> int:
        n, _, mu = self.meta
        return 2 * n * (mu + 1) + 1

    def step(self, state: int, letter: int):
        return self.delta[state][letter], self.labels[state][letter]

    @cached_property
    def rabin_pairs(self):
        """``{name: (A, R)}``; members are ``(state, letter)`` or states for ``dra``."""
        if self.kind == DPTA:
            raise DomainError("parity automata have no Rabin pairs")
        acc, rej = {}, {}
        if self.kind == DRTA:
            for s, row in enumerate(self.labels):
                for a, (sig_acc, sig_rej) in enumerate(row):
                    for name in sig_acc:
                        acc.setdefault(name, set()).add((s, a))
                    for name in sig_rej:
                        rej.setdefault(name, set()).add((s, a))
        else:
            for s, (f_names, e_names) in enumerate(self.state_labels):
                for name in f_names:
                    acc.setdefault(name, set()).add(s)
                for name in e_names:
                    rej.setdefault(name, set()).add(s)
        names = sorted(set(acc) | set(rej), key=name_sort_key)
        return {
            name: (frozenset(acc.get(name, ())), frozenset(rej.get(name, ())))
            for name in names
        }


class MuName(NamedTuple):
    """Batch-mode node name ``bucket.depth``."""

    bucket: int
    depth: int


EPSILON = "ε"


def format_name(name) -> str:
    if isinstance(name, MuName):
        return f"{name.bucket}.{name.depth}"
    if not name:
        return EPSILON
    return ".".join(f"{j}^{occ}" for j, occ in name)


def parse_name(text: str):
    if text in (EPSILON, "eps"):
        return ()
    if "^" not in text:
        bucket, depth = text.split(".")
        return MuName(int(bucket), int(depth))
    parts = []
    for comp in text.split("."):
        j, occ = comp.split("^")
        parts.append((int(j), int(occ)))
    return tuple(parts)


def name_sort_key(name):
    if isinstance(name, MuName):
        return (1, tuple(name))
    return (0, len(name), name)
