"""Model-agnostic procedures.

The greedy deletion loops (local and global) work with any sufficiency
checker.  The ``mlp_*`` functions answer the intractable MLP queries by
exhaustive quantification with early exit; they only evaluate the model,
so they accept any model class.
"""

from __future__ import annotations

from fractions import Fraction
from itertools import combinations
from typing import Callable, Optional, Sequence

from globex.core import (DimensionError, FeatureSubset, Instance, check_desk_scale,
                         compose)
from globex.models import Fbdd, Model, Perceptron, evaluate

LocalChecker = Callable[[Model, Instance, FeatureSubset], bool]
GlobalChecker = Callable[[Model, FeatureSubset], bool]

SEARCH_LIMIT = 24


def _feature(f: Model, i: int) -> None:
    if not 1 <= i <= f.num_features:
        raise DimensionError(f"feature {i} outside 1..{f.num_features}")


def fn_local(f: Model, x: Instance, i: int) -> bool:
    """Is feature i necessary at x?  Equivalent to {i} being contrastive."""
    _feature(f, i)
    return evaluate(f, x.flip(i)) != evaluate(f, x)


def necessary_features(f: Model, x: Instance) -> FeatureSubset:
    n = f.num_features
    return FeatureSubset.of(n, [i for i in range(1, n + 1) if fn_local(f, x, i)])


def local_checker(f: Model) -> LocalChecker:
    """The dedicated local sufficiency check for f's model class."""
    if isinstance(f, Fbdd):
        from globex.fbdd_solver import fbdd_csr
        return fbdd_csr
    if isinstance(f, Perceptron):
        from globex.linear_solver import perc_csr
        return perc_csr
    return mlp_csr


def global_checker(f: Model) -> GlobalChecker:
    if isinstance(f, Fbdd):
        from globex.fbdd_solver import fbdd_g_csr
        return fbdd_g_csr
    if isinstance(f, Perceptron):
        from globex.linear_solver import perc_g_csr
        return perc_g_csr
    return mlp_g_csr


def _ordering(n: int, ordering: Optional[Sequence[int]]) -> list[int]:
    if ordering is None:
        return list(range(1, n + 1))
    ordering = list(ordering)
    if sorted(ordering) != list(range(1, n + 1)):
        raise ValueError(f"ordering must be a permutation of 1..{n}")
    return ordering


def subset_minimal_local(f: Model, x: Instance,
                         ordering: Optional[Sequence[int]] = None,
                         check: Optional[LocalChecker] = None) -> FeatureSubset:
    check = check or local_checker(f)
    n = f.num_features
    S = FeatureSubset.full(n)
    for i in _ordering(n, ordering):
        if check(f, x, S.without(i)):
            S = S.without(i)
    return S


def subset_minimal_global(f: Model, ordering: Optional[Sequence[int]] = None,
                          check: Optional[GlobalChecker] = None) -> FeatureSubset:
    check = check or global_checker(f)
    n = f.num_features
    S = FeatureSubset.full(n)
    for i in _ordering(n, ordering):
        if check(f, S.without(i)):
            S = S.without(i)
    return S


def msr_search(f: Model, x: Instance, k: int,
               check: Optional[LocalChecker] = None,
               limit: int = SEARCH_LIMIT) -> tuple[bool, Optional[FeatureSubset]]:
    """Smallest sufficient reason at x, if one of size <= k exists.

    Every sufficient reason contains every necessary feature, so the search
    starts from that set and only adds the remaining features.  Within a
    cardinality, candidates are tried in lexicographic order; adding a fixed
    disjoint set preserves that order, so the first hit is lexicographically
    smallest.
    """
    n = f.num_features
    check_desk_scale("minimum sufficient reason search", n, limit)
    check = check or local_checker(f)
    base = necessary_features(f, x)
    rest = [i for i in range(1, n + 1) if i not in base]
    for size in range(len(base), min(k, n) + 1):
        for extra in combinations(rest, size - len(base)):
            S = FeatureSubset.of(n, base.members + extra)
            if check(f, x, S):
                return True, S
    return False, None


# ---------------------------------------------------------------------------
# exhaustive quantification (MLP column)
# ---------------------------------------------------------------------------

class _Labels:
    """Memoised predictions keyed by instance mask."""

    def __init__(self, f: Model, limit: int):
        check_desk_scale("exhaustive quantification", f.num_features, limit)
        self.f = f
        self.n = f.num_features
        self.cache: dict[int, bool] = {}

    def __call__(self, mask: int) -> bool:
        v = self.cache.get(mask)
        if v is None:
            v = self.cache[mask] = evaluate(self.f, Instance.from_mask(mask, self.n))
        return v


def _submasks(mask: int):
    sub = 0
    while True:
        yield sub
        sub = (sub - mask) & mask
        if sub == 0:
            return


def _full(n):
    return (1 << n) - 1


def mlp_csr_counterexample(f: Model, x: Instance, S: FeatureSubset,
                           limit: int = SEARCH_LIMIT) -> Optional[Instance]:
    """A completion z with f(x_S; z) != f(x), or None if S is sufficient."""
    label = _Labels(f, limit)
    fixed = x.mask & S.mask
    target = label(x.mask)
    for z in _submasks(_full(f.num_features) ^ S.mask):
        if label(fixed | z) != target:
            return Instance.from_mask(z, f.num_features)
    return None


def mlp_csr(f: Model, x: Instance, S: FeatureSubset, limit: int = SEARCH_LIMIT) -> bool:
    return mlp_csr_counterexample(f, x, S, limit) is None


def mlp_g_csr_counterexample(f: Model, S: FeatureSubset, limit: int = SEARCH_LIMIT
                             ) -> Optional[tuple[Instance, Instance]]:
    """A pair (x, z) with f(x_S; z_rest) != f(x), or None."""
    label = _Labels(f, limit)
    n = f.num_features
    free = _full(n) ^ S.mask
    for a in _submasks(S.mask):
        first = None
        for u in _submasks(free):
            if first is None:
                first = u
            elif label(a | u) != label(a | first):
                return Instance.from_mask(a | first, n), Instance.from_mask(u, n)
    return None


def mlp_g_csr(f: Model, S: FeatureSubset, limit: int = SEARCH_LIMIT) -> bool:
    return mlp_g_csr_counterexample(f, S, limit) is None


def flip_witness(f: Model, i: int, changes: bool,
                 limit: int = SEARCH_LIMIT) -> Optional[Instance]:
    """Smallest-mask x at which flipping i does (or does not) change f."""
    _feature(f, i)
    label = _Labels(f, limit)
    bit = 1 << (i - 1)
    for m in range(1 << f.num_features):
        if m & bit:
            continue
        if (label(m) != label(m | bit)) == changes:
            return Instance.from_mask(m, f.num_features)
    return None


def mlp_g_fn(f: Model, i: int, limit: int = SEARCH_LIMIT) -> bool:
    return flip_witness(f, i, changes=False, limit=limit) is None


def mlp_g_fr(f: Model, i: int, limit: int = SEARCH_LIMIT) -> bool:
    # globally redundant iff necessary at no instance
    return flip_witness(f, i, changes=True, limit=limit) is None


def mlp_g_msr(f: Model, k: int, limit: int = SEARCH_LIMIT) -> tuple[bool, FeatureSubset]:
    """The unique minimal global sufficient reason: features necessary somewhere."""
    n = f.num_features
    U = FeatureSubset.of(n, [i for i in range(1, n + 1)
                             if flip_witness(f, i, changes=True, limit=limit) is not None])
    return len(U) <= k, U


def mlp_fr_witness(f: Model, x: Instance, i: int, check: Optional[LocalChecker] = None,
                   limit: int = SEARCH_LIMIT) -> Optional[FeatureSubset]:
    """A subset S containing i that is sufficient while S minus i is not."""
    _feature(f, i)
    n = f.num_features
    check_desk_scale("redundancy witness search", n, limit)
    check = check or (lambda g, y, S: mlp_csr(g, y, S, limit))
    others = [j for j in range(1, n + 1) if j != i]
    for size in range(0, n):
        for rest in combinations(others, size):
            S = FeatureSubset.of(n, rest + (i,))
            if check(f, x, S) and not check(f, x, S.without(i)):
                return S
    return None


def mlp_fr(f: Model, x: Instance, i: int, limit: int = SEARCH_LIMIT) -> bool:
    return mlp_fr_witness(f, x, i, limit=limit) is None


def mlp_msr(f: Model, x: Instance, k: int, limit: int = SEARCH_LIMIT):
    return msr_search(f, x, k, lambda g, y, S: mlp_csr(g, y, S, limit), limit)


def mlp_cc(f: Model, x: Instance, S: FeatureSubset,
           limit: int = SEARCH_LIMIT) -> tuple[int, Fraction]:
    label = _Labels(f, limit)
    n = f.num_features
    fixed = x.mask & S.mask
    target = label(x.mask)
    free = _full(n) ^ S.mask
    count = sum(1 for z in _submasks(free) if label(fixed | z) == target)
    return count, Fraction(count, 1 << bin(free).count("1"))


def mlp_g_cc(f: Model, S: FeatureSubset, limit: int = SEARCH_LIMIT) -> tuple[int, Fraction]:
    label = _Labels(f, limit)
    n = f.num_features
    free = _full(n) ^ S.mask
    width = bin(free).count("1")
    count = 0
    for a in _submasks(S.mask):
        ones = sum(1 for u in _submasks(free) if label(a | u))
        zeros = (1 << width) - ones
        # every x in this block pairs with every completion z
        count += ones * ones + zeros * zeros
    return count, Fraction(count, 1 << (n + width))


def counterexample_pair(x: Instance, z: Instance, S: FeatureSubset) -> dict:
    """Replayable witness against sufficiency of S."""
    return {"x": str(x), "z": str(z), "composed": str(compose(x, z, S))}
