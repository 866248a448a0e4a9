"""Minimum hitting sets and the sufficient/contrastive duality.

A set is a global sufficient reason exactly when it hits every local
contrastive reason (of every instance), and a global contrastive reason
exactly when it hits every local sufficient reason.  Minimum hitting sets
of the subset-minimal families therefore give cardinally minimal global
reasons.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

import numpy as np

from globex import oracle
from globex.core import FeatureSubset, Instance, check_desk_scale
from globex.models import Model

HS_BUDGET = 1_000_000


class BudgetExceeded(RuntimeError):
    pass


@dataclass(frozen=True)
class SubsetFamily:
    subsets: tuple[FeatureSubset, ...]
    universe_size: int

    def __post_init__(self):
        uniq = {s.members: s for s in self.subsets}
        object.__setattr__(self, "subsets", tuple(uniq[k] for k in sorted(uniq)))

    @classmethod
    def of(cls, n: int, sets) -> "SubsetFamily":
        return cls(tuple(s if isinstance(s, FeatureSubset) else FeatureSubset.of(n, s)
                         for s in sets), n)

    def __len__(self):
        return len(self.subsets)


class _Search:
    def __init__(self, sets: list[int], budget: int):
        self.sets = sets
        self.budget = budget
        self.nodes = 0

    def _tick(self):
        self.nodes += 1
        if self.nodes > self.budget:
            raise BudgetExceeded(f"hitting-set search exceeded {self.budget} nodes")

    @staticmethod
    def _packing_bound(unhit: list[int]) -> int:
        # pairwise disjoint members each need their own element
        used = 0
        bound = 0
        for s in sorted(unhit, key=lambda s: s.bit_count()):
            if not s & used:
                used |= s
                bound += 1
        return bound

    def min_size(self, chosen: int, allowed: int, cap: int) -> Optional[int]:
        """Fewest extra elements from ``allowed`` hitting every set not hit by
        ``chosen``, provided that number is at most ``cap``."""
        self._tick()
        unhit = [s & allowed for s in self.sets if not s & chosen]
        if not unhit:
            return 0
        if cap <= 0 or any(s == 0 for s in unhit):
            return None
        if self._packing_bound(unhit) > cap:
            return None
        # scarcest member first: fewest ways to hit it
        target = min(unhit, key=lambda s: (s.bit_count(), s))
        best = None
        rest = allowed
        e = target
        while e:
            low = e & -e
            e ^= low
            sub = self.min_size(chosen | low, rest, (cap if best is None else best - 1) - 1)
            rest &= ~low
            if sub is not None:
                best = sub + 1
        return best

    def all_of_size(self, chosen: int, allowed: int, size: int):
        """Every hitting set extending ``chosen`` by exactly ``size`` elements
        of ``allowed``; each set is produced once."""
        self._tick()
        unhit = [s & allowed for s in self.sets if not s & chosen]
        if not unhit:
            if size == 0:
                yield chosen
            return
        if size <= 0 or any(s == 0 for s in unhit) or self._packing_bound(unhit) > size:
            return
        target = min(unhit, key=lambda s: (s.bit_count(), s))
        rest = allowed
        e = target
        while e:
            low = e & -e
            e ^= low
            # the first element of target inside the result is ``low``
            yield from self.all_of_size(chosen | low, rest & ~low, size - 1)
            rest &= ~low


def minimum_hitting_set(fam: SubsetFamily, budget: int = HS_BUDGET) -> FeatureSubset:
    """Smallest set meeting every member.

    Among sets of minimum size, the one covering the most members in total
    (summed over its elements) wins, then the lexicographically smallest.
    Raises ValueError if the family contains the empty set, which nothing
    can hit, and BudgetExceeded when the search grows past ``budget`` nodes.
    """
    n = fam.universe_size
    sets = [s.mask for s in fam.subsets]
    if any(m == 0 for m in sets):
        raise ValueError("the family contains the empty set; no hitting set exists")
    search = _Search(sets, budget)
    full = (1 << n) - 1
    size = search.min_size(0, full, n)
    assert size is not None
    freq = [sum(1 for s in sets if s >> k & 1) for k in range(n)]

    def key(mask):
        members = [k + 1 for k in range(n) if mask >> k & 1]
        return -sum(freq[k - 1] for k in members), members

    best = min(search.all_of_size(0, full, size), key=key)
    return FeatureSubset.from_mask(best, n)


def hits_all(h: FeatureSubset, fam: SubsetFamily) -> bool:
    return all(h.intersects(s) for s in fam.subsets)


def _all_instances(n):
    return (Instance.from_mask(m, n) for m in range(1 << n))


def local_contrastive_family(f: Model, limit=oracle.DEFAULT_LIMIT) -> SubsetFamily:
    """Subset-minimal local contrastive reasons, across all instances."""
    n = f.num_features
    sets = []
    for x in _all_instances(n):
        sets.extend(oracle.enumerate_subset_minimal_contrastive_local(f, x, limit))
    return SubsetFamily(tuple(sets), n)


def local_sufficient_family(f: Model, limit=oracle.DEFAULT_LIMIT) -> SubsetFamily:
    n = f.num_features
    sets = []
    for x in _all_instances(n):
        sets.extend(oracle.enumerate_subset_minimal_suff_local(f, x, limit))
    return SubsetFamily(tuple(sets), n)


def g_msr_via_duality(f: Model, limit=oracle.DEFAULT_LIMIT) -> FeatureSubset:
    check_desk_scale("duality enumeration", f.num_features, limit.max_enumeration_features)
    return minimum_hitting_set(local_contrastive_family(f, limit))


def g_contrastive_via_duality(f: Model, limit=oracle.DEFAULT_LIMIT) -> Optional[FeatureSubset]:
    """Cardinally minimal global contrastive reason; None for constant models,
    where the empty set is sufficient everywhere and nothing can be flipped."""
    check_desk_scale("duality enumeration", f.num_features, limit.max_enumeration_features)
    fam = local_sufficient_family(f, limit)
    if any(len(s) == 0 for s in fam.subsets):
        return None
    return minimum_hitting_set(fam)


def check_intersection_duality(f: Model, limit=oracle.DEFAULT_LIMIT) -> bool:
    """Every global sufficient reason meets every local contrastive reason and
    every global contrastive reason meets every local sufficient reason."""
    n = f.num_features
    check_desk_scale("duality enumeration", n, limit.max_enumeration_features)
    g_suff = [s.mask for s in oracle.enumerate_global_sufficient(f, limit)]
    g_contr = [s.mask for s in oracle.enumerate_global_contrastive(f, limit)]
    for x in _all_instances(n):
        contr = np.flatnonzero(oracle.contrastive_table(f, x, limit))
        suff = np.flatnonzero(oracle.sufficiency_table(f, x, limit))
        for g in g_suff:
            if np.any((contr & g) == 0):
                return False
        for g in g_contr:
            if np.any((suff & g) == 0):
                return False
    return True
