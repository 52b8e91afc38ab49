"""Membership of ultimately periodic words, independent of the determinizers.

For a nondeterministic automaton the run space over ``u . v^omega`` is the
finite product graph of states and word positions; a Streett-good cycle in
it is searched with the usual recursive strongly-connected decomposition.
Deterministic automata are simply run until the ``(state, cycle start)``
pair repeats.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Dict, Hashable, Iterable, List, Optional, Sequence, Tuple

import networkx as nx

from .errors import DomainError
from .omega import (
    DPTA,
    DRA,
    STATE,
    CycleSummary,
    DetTransitionAutomaton,
    Lasso,
    StreettNSA,
    evaluate_parity,
    evaluate_rabin,
    evaluate_streett,
)


@dataclass
class ProductGraph:
    """Vertices are ``(state, position)``; positions ``>= len(prefix)`` repeat.

    ``edges`` maps ``(src_vertex, dst_vertex)`` to the set of automaton
    transitions realising that step (several letters never share a position,
    so this is at most one transition, but keeping a set is harmless).
    """

    vertices: List[Tuple[int, int]]
    edges: Dict[Tuple[Tuple[int, int], Tuple[int, int]], Tuple[int, int, int]]
    initial: List[Tuple[int, int]]


def product_graph(nsa: StreettNSA, word: Lasso) -> ProductGraph:
    if not word.cycle:
        raise DomainError("lasso cycle must be nonempty")
    for a in word.letters():
        if not 0 <= a < nsa.alphabet.size:
            raise DomainError(f"letter {a} outside alphabet of size {nsa.alphabet.size}")
    letters = word.prefix + word.cycle
    span = len(letters)
    loop = len(word.prefix)
    start = [(q, 0) for q in sorted(nsa.initial)]
    seen = set(start)
    todo = list(start)
    edges = {}
    while todo:
        q, pos = v = todo.pop()
        a = letters[pos]
        nxt = pos + 1 if pos + 1 < span else loop
        for d in nsa.post[q][a]:
            w = (d, nxt)
            edges[(v, w)] = (q, a, d)
            if w not in seen:
                seen.add(w)
                todo.append(w)
    return ProductGraph(sorted(seen), edges, start)


def streett_good_cycle_exists(
    vertices: Iterable[Hashable],
    edges: Dict[Tuple[Hashable, Hashable], Hashable],
    pairs: Sequence[Tuple[frozenset, frozenset]],
    vertex_label=None,
    basis: str = STATE,
) -> bool:
    """Whether some cycle of the graph satisfies every Streett pair.

    ``edges`` maps each edge to its label (the object pair members refer to
    for transition-based pairs); ``vertex_label`` maps a vertex to the object
    pair members refer to for state-based pairs (identity by default).
    Callers pass only the reachable part of the graph.
    """
    label = vertex_label or (lambda v: v)
    graph = nx.DiGraph()
    graph.add_nodes_from(vertices)
    graph.add_edges_from(edges)
    work = [graph]
    while work:
        g = work.pop()
        for comp in nx.strongly_connected_components(g):
            sub = g.subgraph(comp)
            if sub.number_of_edges() == 0:
                continue
            if basis == STATE:
                seen = {label(v) for v in comp}
            else:
                seen = {edges[e] for e in sub.edges}
            bad = [i for i, (good, b) in enumerate(pairs) if seen.isdisjoint(good) and not seen.isdisjoint(b)]
            if not bad:
                return True
            h = nx.DiGraph(sub)
            if basis == STATE:
                drop = [v for v in comp if any(label(v) in pairs[i][1] for i in bad)]
                h.remove_nodes_from(drop)
            else:
                drop = [e for e in sub.edges if any(edges[e] in pairs[i][1] for i in bad)]
                h.remove_edges_from(drop)
            work.append(h)
    return False


def nsa_accepts(nsa: StreettNSA, word: Lasso) -> bool:
    """Some run of ``nsa`` on ``prefix . cycle^omega`` satisfies all pairs."""
    g = product_graph(nsa, word)
    return streett_good_cycle_exists(
        g.vertices, g.edges, nsa.pairs, vertex_label=lambda v: v[0], basis=nsa.basis
    )


def det_cycle(aut: DetTransitionAutomaton, word: Lasso) -> CycleSummary:
    """The transitions, states and priorities the run repeats forever."""
    for a in word.letters():
        if not 0 <= a < aut.alphabet.size:
            raise DomainError(f"letter {a} outside alphabet of size {aut.alphabet.size}")
    s = aut.initial
    for a in word.prefix:
        s = aut.delta[s][a]
    seen: Dict[int, int] = {}
    starts: List[int] = []
    while s not in seen:
        seen[s] = len(starts)
        starts.append(s)
        for a in word.cycle:
            s = aut.delta[s][a]
    loop_starts = starts[seen[s]:]
    transitions, states, priorities = set(), set(), []
    for s in loop_starts:
        for a in word.cycle:
            transitions.add((s, a))
            if aut.kind == DPTA:
                priorities.append(aut.labels[s][a])
            s = aut.delta[s][a]
            states.add(s)
    return CycleSummary(frozenset(transitions), frozenset(states), tuple(priorities))


def det_accepts(aut: DetTransitionAutomaton, word: Lasso) -> bool:
    cycle = det_cycle(aut, word)
    if aut.kind == DPTA:
        return evaluate_parity(cycle)
    basis = STATE if aut.kind == DRA else "transition"
    return evaluate_rabin(cycle, aut.rabin_pairs.values(), basis=basis)


def accepts(automaton, word: Lasso) -> bool:
    """Dispatch on the automaton type."""
    if isinstance(automaton, StreettNSA):
        return nsa_accepts(automaton, word)
    return det_accepts(automaton, word)


def brute_force_good_cycle(
    vertices: Sequence[Hashable],
    edges: Dict[Tuple[Hashable, Hashable], Hashable],
    pairs,
    initial: Optional[Iterable[Hashable]] = None,
    vertex_label=None,
    basis: str = STATE,
) -> bool:
    """Exponential reference: enumerate vertex subsets (or edge subsets for
    transition-based pairs) that are strongly connected and reachable."""
    label = vertex_label or (lambda v: v)
    verts = list(vertices)
    succ = {v: set() for v in verts}
    for (a, b) in edges:
        succ[a].add(b)
    if initial is None:
        reach = set(verts)
    else:
        reach, todo = set(initial), list(initial)
        while todo:
            v = todo.pop()
            for w in succ[v]:
                if w not in reach:
                    reach.add(w)
                    todo.append(w)

    def strongly_connected(nodes, arcs):
        nodes = set(nodes)
        if not arcs:
            return False
        first = next(iter(nodes))
        for forward in (True, False):
            adj = {v: [] for v in nodes}
            for a, b in arcs:
                if forward:
                    adj[a].append(b)
                else:
                    adj[b].append(a)
            seen, todo = {first}, [first]
            while todo:
                v = todo.pop()
                for w in adj[v]:
                    if w not in seen:
                        seen.add(w)
                        todo.append(w)
            if seen != nodes:
                return False
        return True

    live = [v for v in verts if v in reach]
    if basis == STATE:
        for mask in range(1, 1 << len(live)):
            nodes = [v for i, v in enumerate(live) if mask >> i & 1]
            inside = set(nodes)
            arcs = [e for e in edges if e[0] in inside and e[1] in inside]
            if strongly_connected(nodes, arcs):
                cyc = CycleSummary(frozenset(), frozenset(label(v) for v in nodes))
                if evaluate_streett(cyc, pairs, STATE):
                    return True
        return False
    arcs_all = [e for e in edges if e[0] in reach]
    for mask in range(1, 1 << len(arcs_all)):
        arcs = [e for i, e in enumerate(arcs_all) if mask >> i & 1]
        nodes = {v for e in arcs for v in e}
        if strongly_connected(nodes, arcs):
            cyc = CycleSummary(frozenset(edges[e] for e in arcs))
            if evaluate_streett(cyc, pairs, "transition"):
                return True
    return False
