"""Explanation queries on FBDDs.

Global queries compare pairs of root-to-leaf paths.  A path fixes the
features tested along it and leaves every other feature free, so two paths
can be realised by one pair of inputs exactly when they agree on the
features both of them fix.  Local queries walk the diagram directly.

Pair enumeration is quadratic in the number of paths.  For decision trees
that is the number of leaves; heavily shared DAGs can have many more paths
than nodes, which ``max_paths`` guards against.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from itertools import combinations
from typing import Optional, Sequence

from globex.core import (DeskScaleError, DimensionError, FeatureSubset, Instance,
                         check_desk_scale)
from globex.generic_solver import SEARCH_LIMIT, msr_search, subset_minimal_global
from globex.models import Fbdd

MAX_PATHS = 1 << 14


@dataclass(frozen=True)
class PathProfile:
    leaf_id: int
    label: bool
    fixed: tuple[tuple[int, int], ...]  # (feature, value) in path order

    @property
    def fixed_mask(self) -> int:
        return _masks(self)[0]

    @property
    def value_mask(self) -> int:
        return _masks(self)[1]

    def as_dict(self) -> dict[int, int]:
        return dict(self.fixed)


@lru_cache(maxsize=None)
def _masks(p: PathProfile) -> tuple[int, int]:
    fm = vm = 0
    for var, bit in p.fixed:
        fm |= 1 << (var - 1)
        vm |= bit << (var - 1)
    return fm, vm


def enumerate_paths(f: Fbdd, max_paths: int = MAX_PATHS) -> tuple[PathProfile, ...]:
    """Every root-to-leaf path of f."""
    return _paths(f, max_paths)


@lru_cache(maxsize=64)
def _paths(f: Fbdd, max_paths: int) -> tuple[PathProfile, ...]:
    out = []
    stack = [(f.root, ())]
    while stack:
        nid, fixed = stack.pop()
        if f.is_leaf(nid):
            out.append(PathProfile(nid, f.label(nid), fixed))
            if len(out) > max_paths:
                raise DeskScaleError("FBDD path enumeration", len(out), max_paths)
            continue
        v = f.node(nid)
        stack.append((v.hi, fixed + ((v.var, 1),)))
        stack.append((v.lo, fixed + ((v.var, 0),)))
    out.reverse()
    return tuple(out)


def _conflict(a: PathProfile, b: PathProfile, within: int) -> bool:
    """Do a and b fix some feature in ``within`` to different values?"""
    fa, va = _masks(a)
    fb, vb = _masks(b)
    return bool((va ^ vb) & fa & fb & within)


def _check(f: Fbdd, x: Optional[Instance] = None, S: Optional[FeatureSubset] = None):
    if x is not None and len(x) != f.num_features:
        raise DimensionError(f"instance has {len(x)} features, model expects {f.num_features}")
    if S is not None and S.universe_size != f.num_features:
        raise DimensionError(f"subset over {S.universe_size} features, model has {f.num_features}")


def _feature(f: Fbdd, i: int) -> None:
    if not 1 <= i <= f.num_features:
        raise DimensionError(f"feature {i} outside 1..{f.num_features}")


def _full(n: int) -> int:
    return (1 << n) - 1


# ---------------------------------------------------------------------------
# local queries
# ---------------------------------------------------------------------------

def fbdd_csr_counterexample(f: Fbdd, x: Instance, S: FeatureSubset) -> Optional[Instance]:
    """A completion z for which f(x_S; z) differs from f(x), or None."""
    _check(f, x, S)
    target = f.evaluate(x)
    inside = S.mask
    seen = set()
    stack = [(f.root, ())]
    while stack:
        nid, trail = stack.pop()
        if f.is_leaf(nid):
            if f.label(nid) != target:
                bits = list(x.bits)
                for var, bit in trail:
                    bits[var - 1] = bit
                return Instance(tuple(bits))
            continue
        if nid in seen:
            continue
        seen.add(nid)
        v = f.node(nid)
        if inside >> (v.var - 1) & 1:
            stack.append((v.hi if x.bits[v.var - 1] else v.lo, trail))
        else:
            stack.append((v.lo, trail + ((v.var, 0),)))
            stack.append((v.hi, trail + ((v.var, 1),)))
    return None


def fbdd_csr(f: Fbdd, x: Instance, S: FeatureSubset) -> bool:
    """Every path consistent with x on S ends in the label of x."""
    return fbdd_csr_counterexample(f, x, S) is None


def fbdd_cc(f: Fbdd, x: Instance, S: FeatureSubset) -> tuple[int, Fraction]:
    """Number and fraction of completions of x_S that keep f(x)."""
    _check(f, x, S)
    target = f.evaluate(x)
    inside = S.mask
    free = f.num_features - len(S)
    c = _share_iterative(f, x, inside, target)
    count = c * (1 << free)
    assert count.denominator == 1
    return int(count), c


def _share_iterative(f: Fbdd, x: Instance, inside: int, target: bool) -> Fraction:
    # post-order evaluation; deep diagrams would overflow a recursive version
    memo: dict[int, Fraction] = {}
    stack = [f.root]
    while stack:
        nid = stack[-1]
        if f.is_leaf(nid):
            memo[nid] = Fraction(int(f.label(nid) == target))
            stack.pop()
            continue
        if nid in memo:
            stack.pop()
            continue
        v = f.node(nid)
        fixed = inside >> (v.var - 1) & 1
        kids = [v.hi if x.bits[v.var - 1] else v.lo] if fixed else [v.lo, v.hi]
        pending = [c for c in kids if c not in memo]
        if pending:
            stack.extend(pending)
            continue
        memo[nid] = memo[kids[0]] if fixed else (memo[v.lo] + memo[v.hi]) / 2
        stack.pop()
    return memo[f.root]


def fbdd_msr(f: Fbdd, x: Instance, k: int,
             limit: int = SEARCH_LIMIT) -> tuple[bool, Optional[FeatureSubset]]:
    _check(f, x)
    return msr_search(f, x, k, fbdd_csr, limit)


def fbdd_fr_witness(f: Fbdd, x: Instance, i: int,
                    limit: int = SEARCH_LIMIT) -> Optional[FeatureSubset]:
    """Smallest S containing i with S sufficient and S minus i not."""
    _check(f, x)
    _feature(f, i)
    n = f.num_features
    check_desk_scale("redundancy witness search", n, limit)
    others = [j for j in range(1, n + 1) if j != i]
    for size in range(n):
        for rest in combinations(others, size):
            S = FeatureSubset.of(n, rest + (i,))
            if fbdd_csr(f, x, S) and not fbdd_csr(f, x, S.without(i)):
                return S
    return None


def fbdd_fr(f: Fbdd, x: Instance, i: int, limit: int = SEARCH_LIMIT) -> bool:
    return fbdd_fr_witness(f, x, i, limit) is None


# ---------------------------------------------------------------------------
# global queries
# ---------------------------------------------------------------------------

def _pair_instances(f: Fbdd, a: PathProfile, b: PathProfile, S: FeatureSubset):
    """x following a and z such that (x_S; z) follows b."""
    n = f.num_features
    xb = [0] * n
    zb = [0] * n
    for var, bit in b.fixed:
        if var in S:
            xb[var - 1] = bit
        else:
            zb[var - 1] = bit
    for var, bit in a.fixed:
        xb[var - 1] = bit
    return Instance(tuple(xb)), Instance(tuple(zb))


def fbdd_g_csr_counterexample(f: Fbdd, S: FeatureSubset,
                              max_paths: int = MAX_PATHS
                              ) -> Optional[tuple[Instance, Instance]]:
    _check(f, None, S)
    paths = enumerate_paths(f, max_paths)
    pos = [p for p in paths if p.label]
    neg = [p for p in paths if not p.label]
    for a in pos:
        for b in neg:
            if not _conflict(a, b, S.mask):
                return _pair_instances(f, a, b, S)
    return None


def fbdd_g_csr(f: Fbdd, S: FeatureSubset, max_paths: int = MAX_PATHS) -> bool:
    """No two differently-labelled paths agree on the S features they share."""
    return fbdd_g_csr_counterexample(f, S, max_paths) is None


def fbdd_g_msr(f: Fbdd, k: int, ordering: Optional[Sequence[int]] = None,
               max_paths: int = MAX_PATHS) -> tuple[bool, FeatureSubset]:
    U = subset_minimal_global(f, ordering,
                              lambda g, S: fbdd_g_csr(g, S, max_paths))
    return len(U) <= k, U


def _flip_pairs(f: Fbdd, i: int, max_paths: int):
    # pairs fixing i to opposite values and agreeing on every other shared feature
    bit = 1 << (i - 1)
    paths = enumerate_paths(f, max_paths)
    zero = [p for p in paths if p.fixed_mask & bit and not p.value_mask & bit]
    one = [p for p in paths if p.fixed_mask & bit and p.value_mask & bit]
    others = _full(f.num_features) ^ bit
    for a in zero:
        for b in one:
            if not _conflict(a, b, others):
                yield a, b


def fbdd_g_fn_witness(f: Fbdd, i: int, max_paths: int = MAX_PATHS) -> Optional[Instance]:
    """An instance at which flipping i leaves f unchanged, or None."""
    _feature(f, i)
    bit = 1 << (i - 1)
    n = f.num_features
    for p in enumerate_paths(f, max_paths):
        if not p.fixed_mask & bit:
            return Instance.from_mask(p.value_mask, n)
    for a, b in _flip_pairs(f, i, max_paths):
        if a.label == b.label:
            return Instance.from_mask(a.value_mask | (b.value_mask & ~bit), n)
    return None


def fbdd_g_fn(f: Fbdd, i: int, max_paths: int = MAX_PATHS) -> bool:
    return fbdd_g_fn_witness(f, i, max_paths) is None


def fbdd_g_fr_witness(f: Fbdd, i: int, max_paths: int = MAX_PATHS) -> Optional[Instance]:
    """An instance at which flipping i changes f, or None."""
    _feature(f, i)
    bit = 1 << (i - 1)
    for a, b in _flip_pairs(f, i, max_paths):
        if a.label != b.label:
            return Instance.from_mask(a.value_mask | (b.value_mask & ~bit), f.num_features)
    return None


def fbdd_g_fr(f: Fbdd, i: int, max_paths: int = MAX_PATHS) -> bool:
    return fbdd_g_fr_witness(f, i, max_paths) is None


def fbdd_g_cc(f: Fbdd, S: FeatureSubset, max_paths: int = MAX_PATHS) -> tuple[int, Fraction]:
    """Count pairs (x, z) with f(x_S; z) = f(x), summed over path pairs.

    x follows path a and (x_S; z) follows path b.  The free bits of x are
    those fixed neither by a nor by b's S part; z is constrained only by
    b's fixes outside S.
    """
    _check(f, None, S)
    n = f.num_features
    inside = S.mask
    outside = _full(n) ^ inside
    free = n - len(S)
    paths = enumerate_paths(f, max_paths)
    count = 0
    for a in paths:
        fa = a.fixed_mask
        for b in paths:
            if a.label != b.label or _conflict(a, b, inside):
                continue
            fb = b.fixed_mask
            x_free = n - fa.bit_count() - (fb & inside & ~fa).bit_count()
            z_free = free - (fb & outside).bit_count()
            count += 1 << (x_free + z_free)
    return count, Fraction(count, 1 << (n + free))
