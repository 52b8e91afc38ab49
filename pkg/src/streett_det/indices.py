"""Cover and Mini over index sets ``beta`` included in ``[k] = {1..k}``.

Index sets are handled internally as int bitmasks where bit ``i`` stands for
index ``i``; bit 0 is never set.  The public functions :func:`cover` and
:func:`mini` take and return plain sets.
"""
from __future__ import annotations

from typing import Iterable, Sequence

from .errors import DomainError


def to_mask(indices: Iterable[int]) -> int:
    mask = 0
    for i in indices:
        mask |= 1 << i
    return mask


def from_mask(mask: int) -> frozenset:
    out = []
    i = 0
    while mask:
        if mask & 1:
            out.append(i)
        mask >>= 1
        i += 1
    return frozenset(out)


def max_index(mask: int) -> int:
    """Largest member of a mask, 0 for the empty mask."""
    return mask.bit_length() - 1 if mask else 0


class GFamily:
    """The first components ``G_1..G_k`` of a list of Streett pairs.

    Results of :meth:`cover_mask` and :meth:`mini_mask` are memoized; the
    memo only ever gains entries, each computed once from immutable data.
    """

    def __init__(self, goods: Sequence[Iterable[int]]):
        self.k = len(goods)
        self.goods = (0,) + tuple(to_mask(g) for g in goods)
        self.full = ((1 << (self.k + 1)) - 1) & ~1
        self._cover = {}
        self._mini = {}

    @classmethod
    def of(cls, nsa) -> "GFamily":
        return cls([g for g, _ in nsa.pairs])

    def union(self, beta: int) -> int:
        """``G_beta``, the union of ``G_i`` for ``i`` in ``beta``."""
        out = 0
        for i in range(1, self.k + 1):
            if beta >> i & 1:
                out |= self.goods[i]
        return out

    def _check(self, beta: int):
        if beta & ~self.full:
            raise DomainError(f"index set {sorted(from_mask(beta))} not within [1..{self.k}]")

    def cover_mask(self, beta: int) -> int:
        try:
            return self._cover[beta]
        except KeyError:
            pass
        self._check(beta)
        g_beta = self.union(beta)
        out = 0
        for j in range(1, self.k + 1):
            if self.goods[j] & ~g_beta == 0:
                out |= 1 << j
        self._cover[beta] = out
        return out

    def mini_mask(self, beta: int) -> int:
        try:
            return self._mini[beta]
        except KeyError:
            pass
        self._check(beta)
        g_beta = self.union(beta)
        rest = [j for j in range(1, self.k + 1) if not self.cover_mask(beta) >> j & 1]
        ext = {j: self.goods[j] | g_beta for j in rest}
        out = 0
        for j in rest:
            # no strictly smaller extension, and no equal extension at a lower index
            if any(ext[o] != ext[j] and ext[o] & ~ext[j] == 0 for o in rest if o != j):
                continue
            if any(ext[o] == ext[j] for o in rest if o < j):
                continue
            out |= 1 << j
        self._mini[beta] = out
        return out


def cover(beta: Iterable[int], fam: GFamily) -> frozenset:
    """``{j in [k] | G_j is contained in G_beta}``."""
    return from_mask(fam.cover_mask(_checked_mask(beta)))


def mini(beta: Iterable[int], fam: GFamily) -> frozenset:
    """Indices outside ``cover(beta)`` whose extension ``G_j | G_beta`` is minimal,
    keeping the lowest index among equal extensions."""
    return from_mask(fam.mini_mask(_checked_mask(beta)))


def _checked_mask(beta: Iterable[int]) -> int:
    beta = list(beta)
    if any(not isinstance(i, int) or i < 1 for i in beta):
        raise DomainError(f"index set {beta} must hold positive integers")
    return to_mask(beta)
