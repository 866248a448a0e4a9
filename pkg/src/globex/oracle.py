"""Brute-force ground truth for every explanation query.

Each query is answered by exhaustive enumeration over the model's truth
table.  Nothing here is shared with the dedicated solvers, which is what
makes differential testing against this module meaningful.

Truth tables are indexed by integer masks: bit ``k`` of the index is the
value of feature ``k + 1``.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from itertools import combinations

import numpy as np

from globex.core import DimensionError, FeatureSubset, Instance, check_desk_scale
from globex.models import Fbdd, Mlp, Model, Perceptron


@dataclass(frozen=True)
class DeskScaleLimit:
    max_features: int = 24
    max_enumeration_features: int = 14


DEFAULT_LIMIT = DeskScaleLimit()


@dataclass(frozen=True)
class ReasonSet:
    """Deduplicated subsets, ordered lexicographically by member list."""

    subsets: tuple[FeatureSubset, ...]

    def __post_init__(self):
        uniq = {s.members: s for s in self.subsets}
        object.__setattr__(self, "subsets", tuple(uniq[k] for k in sorted(uniq)))

    def __len__(self):
        return len(self.subsets)

    def __iter__(self):
        return iter(self.subsets)

    def __contains__(self, s):
        return any(t.members == s.members for t in self.subsets)

    def as_lists(self) -> list[list[int]]:
        return [list(s.members) for s in self.subsets]


# ---------------------------------------------------------------------------
# truth tables and mask helpers
# ---------------------------------------------------------------------------

def truth_table(f: Model, limit: DeskScaleLimit = DEFAULT_LIMIT) -> np.ndarray:
    check_desk_scale("truth table", f.num_features, limit.max_features)
    return _table(f)


@lru_cache(maxsize=128)
def _table(f: Model) -> np.ndarray:
    n = f.num_features
    size = 1 << n
    if isinstance(f, Perceptron):
        # exact integer scores, one addition per entry
        W, B, _ = f.scaled
        scores = [B] * size
        for idx in range(1, size):
            low = idx & -idx
            scores[idx] = scores[idx ^ low] + W[low.bit_length() - 1]
        table = np.fromiter((s > 0 for s in scores), dtype=bool, count=size)
    elif isinstance(f, (Fbdd, Mlp)):
        table = np.fromiter((f.evaluate(Instance.from_mask(idx, n))
                             for idx in range(size)), dtype=bool, count=size)
    else:
        raise TypeError(f"not a model: {type(f).__name__}")
    table.setflags(write=False)
    return table


def _submasks(mask: int) -> np.ndarray:
    """All submasks of ``mask`` as an int64 array (including 0 and mask)."""
    subs = np.zeros(1, dtype=np.int64)
    k = 0
    while mask >> k:
        if (mask >> k) & 1:
            subs = np.concatenate([subs, subs | (1 << k)])
        k += 1
    return subs


def _full(n: int) -> int:
    return (1 << n) - 1


def _subset_or(flags: np.ndarray, n: int) -> np.ndarray:
    """out[T] = OR of flags[d] over all d contained in T."""
    out = flags.copy()
    for k in range(n):
        view = out.reshape(-1, 2, 1 << k)
        view[:, 1, :] |= view[:, 0, :]
    return out


def sufficiency_table(f: Model, x: Instance,
                      limit: DeskScaleLimit = DEFAULT_LIMIT) -> np.ndarray:
    """suff[S_mask] for every subset S at once.

    S is sufficient iff no instance with a different prediction agrees with
    x on S, i.e. no differing mask d (x xor y) lies inside the complement.
    """
    truth_table(f, limit)
    return _sufficiency(f, x.mask)


# one entry per instance of a 12-feature model
@lru_cache(maxsize=4096)
def _sufficiency(f: Model, xm: int) -> np.ndarray:
    table = _table(f)
    n = f.num_features
    idx = np.arange(1 << n, dtype=np.int64)
    differs = table[xm ^ idx] != table[xm]
    blocked = _subset_or(differs, n)
    suff = ~blocked[_full(n) ^ idx]
    suff.setflags(write=False)
    return suff


def _check(f: Model, x: Instance | None = None, S: FeatureSubset | None = None):
    n = f.num_features
    if x is not None and len(x) != n:
        raise DimensionError(f"instance has {len(x)} features, model expects {n}")
    if S is not None and S.universe_size != n:
        raise DimensionError(f"subset over {S.universe_size} features, model has {n}")


# ---------------------------------------------------------------------------
# sufficiency and contrastiveness
# ---------------------------------------------------------------------------

def suff_local(f: Model, x: Instance, S: FeatureSubset,
               limit: DeskScaleLimit = DEFAULT_LIMIT) -> bool:
    _check(f, x, S)
    table = truth_table(f, limit)
    n = f.num_features
    fixed = x.mask & S.mask
    completions = fixed | _submasks(_full(n) ^ S.mask)
    return bool(np.all(table[completions] == table[x.mask]))


def suff_global(f: Model, S: FeatureSubset,
                limit: DeskScaleLimit = DEFAULT_LIMIT) -> bool:
    _check(f, None, S)
    table = truth_table(f, limit)
    n = f.num_features
    xs = np.arange(1 << n, dtype=np.int64)
    kept = xs & S.mask
    for z in _submasks(_full(n) ^ S.mask):
        if not np.array_equal(table[kept | z], table):
            return False
    return True


def is_contrastive_local(f: Model, x: Instance, S: FeatureSubset,
                         limit: DeskScaleLimit = DEFAULT_LIMIT) -> bool:
    _check(f, x, S)
    table = truth_table(f, limit)
    n = f.num_features
    kept = x.mask & (_full(n) ^ S.mask)
    return bool(np.any(table[kept | _submasks(S.mask)] != table[x.mask]))


def is_contrastive_global(f: Model, S: FeatureSubset,
                          limit: DeskScaleLimit = DEFAULT_LIMIT) -> bool:
    _check(f, None, S)
    table = truth_table(f, limit)
    n = f.num_features
    xs = np.arange(1 << n, dtype=np.int64)
    kept = xs & (_full(n) ^ S.mask)
    flipped = np.zeros(1 << n, dtype=bool)
    for z in _submasks(S.mask):
        flipped |= table[kept | z] != table
    return bool(np.all(flipped))


# ---------------------------------------------------------------------------
# necessity and redundancy (quantifying over all subsets)
# ---------------------------------------------------------------------------

def _necessary_in(suff: np.ndarray, i: int) -> bool:
    # for all S: suff(S) -> not suff(S \ {i})
    idx = np.arange(suff.size, dtype=np.int64)
    return not bool(np.any(suff & suff[idx & ~(1 << (i - 1))]))


def _redundant_in(suff: np.ndarray, i: int) -> bool:
    # for all S: suff(S) -> suff(S \ {i})
    idx = np.arange(suff.size, dtype=np.int64)
    return not bool(np.any(suff & ~suff[idx & ~(1 << (i - 1))]))


def _feature(f: Model, i: int) -> None:
    if not 1 <= i <= f.num_features:
        raise DimensionError(f"feature {i} outside 1..{f.num_features}")


def is_necessary_local(f: Model, x: Instance, i: int,
                       limit: DeskScaleLimit = DEFAULT_LIMIT) -> bool:
    _check(f, x)
    _feature(f, i)
    return _necessary_in(sufficiency_table(f, x, limit), i)


def is_necessary_global(f: Model, i: int,
                        limit: DeskScaleLimit = DEFAULT_LIMIT) -> bool:
    _feature(f, i)
    n = f.num_features
    return all(_necessary_in(sufficiency_table(f, Instance.from_mask(m, n), limit), i)
               for m in range(1 << n))


def is_redundant_local(f: Model, x: Instance, i: int,
                       limit: DeskScaleLimit = DEFAULT_LIMIT) -> bool:
    _check(f, x)
    _feature(f, i)
    return _redundant_in(sufficiency_table(f, x, limit), i)


def is_redundant_global(f: Model, i: int,
                        limit: DeskScaleLimit = DEFAULT_LIMIT) -> bool:
    _feature(f, i)
    n = f.num_features
    return all(_redundant_in(sufficiency_table(f, Instance.from_mask(m, n), limit), i)
               for m in range(1 << n))


# ---------------------------------------------------------------------------
# completion counts
# ---------------------------------------------------------------------------

def count_local(f: Model, x: Instance, S: FeatureSubset,
                limit: DeskScaleLimit = DEFAULT_LIMIT) -> tuple[int, Fraction]:
    _check(f, x, S)
    table = truth_table(f, limit)
    n = f.num_features
    completions = (x.mask & S.mask) | _submasks(_full(n) ^ S.mask)
    count = int(np.count_nonzero(table[completions] == table[x.mask]))
    return count, Fraction(count, completions.size)


def count_global(f: Model, S: FeatureSubset,
                 limit: DeskScaleLimit = DEFAULT_LIMIT) -> tuple[int, Fraction]:
    _check(f, None, S)
    table = truth_table(f, limit)
    n = f.num_features
    xs = np.arange(1 << n, dtype=np.int64)
    kept = xs & S.mask
    free = _submasks(_full(n) ^ S.mask)
    count = 0
    for z in free:
        count += int(np.count_nonzero(table[kept | z] == table))
    return count, Fraction(count, (1 << n) * free.size)


# ---------------------------------------------------------------------------
# reason enumeration and cardinally minimal reasons
# ---------------------------------------------------------------------------

def _minimal_members(flags: np.ndarray, n: int) -> list[int]:
    """Masks S with flags[S] set and flags[S minus i] clear for every i in S."""
    idx = np.arange(flags.size, dtype=np.int64)
    minimal = flags.copy()
    for k in range(n):
        has = (idx >> k) & 1 == 1
        minimal &= ~(has & flags[idx & ~(1 << k)])
    return [int(m) for m in np.flatnonzero(minimal)]


def _reasons(masks, n) -> ReasonSet:
    return ReasonSet(tuple(FeatureSubset.from_mask(m, n) for m in masks))


def enumerate_subset_minimal_suff_local(
        f: Model, x: Instance, limit: DeskScaleLimit = DEFAULT_LIMIT) -> ReasonSet:
    _check(f, x)
    n = f.num_features
    check_desk_scale("reason enumeration", n, limit.max_enumeration_features)
    return _reasons(_minimal_members(sufficiency_table(f, x, limit), n), n)


def contrastive_table(f: Model, x: Instance,
                      limit: DeskScaleLimit = DEFAULT_LIMIT) -> np.ndarray:
    """contr[S_mask]: altering S alone can change the prediction at x."""
    suff = sufficiency_table(f, x, limit)
    idx = np.arange(suff.size, dtype=np.int64)
    return ~suff[_full(f.num_features) ^ idx]


def enumerate_subset_minimal_contrastive_local(
        f: Model, x: Instance, limit: DeskScaleLimit = DEFAULT_LIMIT) -> ReasonSet:
    _check(f, x)
    n = f.num_features
    check_desk_scale("reason enumeration", n, limit.max_enumeration_features)
    return _reasons(_minimal_members(contrastive_table(f, x, limit), n), n)


def global_sufficiency_table(f: Model,
                             limit: DeskScaleLimit = DEFAULT_LIMIT) -> np.ndarray:
    n = f.num_features
    out = np.ones(1 << n, dtype=bool)
    for m in range(1 << n):
        out &= sufficiency_table(f, Instance.from_mask(m, n), limit)
    return out


def global_contrastive_table(f: Model,
                             limit: DeskScaleLimit = DEFAULT_LIMIT) -> np.ndarray:
    n = f.num_features
    out = np.ones(1 << n, dtype=bool)
    for m in range(1 << n):
        out &= contrastive_table(f, Instance.from_mask(m, n), limit)
    return out


def enumerate_global_sufficient(f: Model,
                                limit: DeskScaleLimit = DEFAULT_LIMIT) -> ReasonSet:
    """Every global sufficient reason, minimal or not."""
    n = f.num_features
    check_desk_scale("reason enumeration", n, limit.max_enumeration_features)
    return _reasons(np.flatnonzero(global_sufficiency_table(f, limit)), n)


def enumerate_global_contrastive(f: Model,
                                 limit: DeskScaleLimit = DEFAULT_LIMIT) -> ReasonSet:
    n = f.num_features
    check_desk_scale("reason enumeration", n, limit.max_enumeration_features)
    return _reasons(np.flatnonzero(global_contrastive_table(f, limit)), n)


def _first_by_cardinality(flags: np.ndarray, n: int) -> FeatureSubset | None:
    for k in range(n + 1):
        for combo in combinations(range(1, n + 1), k):
            S = FeatureSubset.of(n, combo)
            if flags[S.mask]:
                return S
    return None


def min_suff_local_brute(f: Model, x: Instance,
                         limit: DeskScaleLimit = DEFAULT_LIMIT) -> FeatureSubset:
    _check(f, x)
    return _first_by_cardinality(sufficiency_table(f, x, limit), f.num_features)


def min_suff_global_brute(f: Model,
                          limit: DeskScaleLimit = DEFAULT_LIMIT) -> FeatureSubset:
    check_desk_scale("global reason search", f.num_features,
                     limit.max_enumeration_features)
    return _first_by_cardinality(global_sufficiency_table(f, limit), f.num_features)


def min_contrastive_global_brute(f: Model, limit: DeskScaleLimit = DEFAULT_LIMIT
                                 ) -> FeatureSubset | None:
    """Smallest global contrastive reason, or None for a constant model."""
    check_desk_scale("global reason search", f.num_features,
                     limit.max_enumeration_features)
    return _first_by_cardinality(global_contrastive_table(f, limit), f.num_features)
