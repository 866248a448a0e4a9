"""Explanation queries on perceptrons.

Everything works on the integer-scaled model ``W = D*w``, ``B = D*b`` with
a common denominator ``D > 0``, which leaves every sign test unchanged and
keeps all arithmetic in Python integers.

The hard global queries reduce to subset-sum questions over these integers
and run either by enumerating the attainable sums (``method="enum"``) or by
a reachable-sum table (``method="dp"``) when the scaled magnitudes fit the
DP budget.  ``"auto"`` prefers DP when it applies.
"""

from __future__ import annotations

import math
from bisect import bisect_right
from dataclasses import dataclass
from fractions import Fraction
from itertools import combinations
from typing import Optional

import numpy as np

from globex.core import (DimensionError, FeatureSubset, Instance, check_desk_scale)
from globex.models import Perceptron

DP_BUDGET = 10**6
ENUM_LIMIT = 24


@dataclass(frozen=True)
class CompletionRange:
    lo: Fraction
    hi: Fraction


def completion_range(f: Perceptron, T: FeatureSubset) -> CompletionRange:
    """Extreme values of sum_{i in T} w_i y_i over y in {0,1}^T."""
    lo = sum((min(f.weights[i - 1], 0) for i in T), Fraction(0))
    hi = sum((max(f.weights[i - 1], 0) for i in T), Fraction(0))
    return CompletionRange(lo, hi)


def _check(f: Perceptron, x: Optional[Instance] = None, S: Optional[FeatureSubset] = None):
    n = f.num_features
    if x is not None and len(x) != n:
        raise DimensionError(f"instance has {len(x)} features, model expects {n}")
    if S is not None and S.universe_size != n:
        raise DimensionError(f"subset over {S.universe_size} features, model has {n}")


def _feature(f: Perceptron, i: int) -> None:
    if not 1 <= i <= f.num_features:
        raise DimensionError(f"feature {i} outside 1..{f.num_features}")


def _fixed_part(W, B, x: Instance, S: FeatureSubset) -> int:
    return B + sum(W[i - 1] for i in S if x.bits[i - 1])


def _int_range(W, T) -> tuple[int, int]:
    return (sum(min(W[i - 1], 0) for i in T), sum(max(W[i - 1], 0) for i in T))


# ---------------------------------------------------------------------------
# polynomial local queries
# ---------------------------------------------------------------------------

def _csr_bounds(f: Perceptron, x: Instance, S: FeatureSubset) -> tuple[int, int, int]:
    """(fixed part t including the bias, lowest and highest completion sum),
    touching only the members of S."""
    _check(f, x, S)
    W, B, _ = f.scaled
    bits = x.bits
    t = B
    lo, hi = f.scaled_range
    for i in S.members:
        w = W[i - 1]
        if bits[i - 1]:
            t += w
        if w < 0:
            lo -= w
        else:
            hi -= w
    return t, lo, hi


def perc_csr_counterexample(f: Perceptron, x: Instance,
                            S: FeatureSubset) -> Optional[Instance]:
    """The extreme completion z that flips f(x), or None if S is sufficient."""
    t, lo, hi = _csr_bounds(f, x, S)
    if t + hi <= 0 or t + lo > 0:
        return None
    # straddling: push the completion toward the opposite class
    W, _, _ = f.scaled
    positive = f.evaluate(x)
    z = [int(w < 0) if positive else int(w > 0) for w in W]
    for i in S.members:
        z[i - 1] = x.bits[i - 1]
    return Instance(tuple(z))


def perc_csr(f: Perceptron, x: Instance, S: FeatureSubset) -> bool:
    t, lo, hi = _csr_bounds(f, x, S)
    return t + hi <= 0 or t + lo > 0


def perc_msr(f: Perceptron, x: Instance, k: int) -> tuple[bool, FeatureSubset]:
    """Cardinally minimal sufficient reason by largest worst-case gain.

    Fixing feature i replaces its worst completion contribution by its
    actual one.  The sufficiency margin is additive in these gains, so the
    best set of a given size is the top gains, and the shortest sufficient
    prefix of the sorted order is a minimum.
    """
    _check(f, x)
    W, B, _ = f.scaled
    n = f.num_features
    if f.evaluate(x):
        gain = [W[i] * x.bits[i] - min(W[i], 0) for i in range(n)]
    else:
        gain = [max(W[i], 0) - W[i] * x.bits[i] for i in range(n)]
    order = sorted(range(1, n + 1), key=lambda i: (-gain[i - 1], i))
    for size in range(n + 1):
        S = FeatureSubset.of(n, order[:size])
        if perc_csr(f, x, S):
            return size <= k, S
    raise AssertionError("the full feature set is always sufficient")


def perc_g_fn_witness(f: Perceptron, i: int) -> Optional[Instance]:
    """An instance at which flipping i keeps the class, or None.

    Flipping i always changes the class iff even the lowest partial sum
    over the other features is positive with i on and the highest is
    non-positive with i off.  Otherwise the extreme completion that breaks
    one of these two conditions is a witness.
    """
    _feature(f, i)
    W, B, _ = f.scaled
    n = f.num_features
    others = [j for j in range(1, n + 1) if j != i]
    lo, hi = _int_range(W, others)
    w = W[i - 1]
    bits = [0] * n
    if lo + B + max(w, 0) <= 0:
        # minimal completion stays in class 0 under both values of i
        for j in others:
            bits[j - 1] = int(W[j - 1] < 0)
    elif hi + B + min(w, 0) > 0:
        for j in others:
            bits[j - 1] = int(W[j - 1] > 0)
    else:
        return None
    return Instance(tuple(bits))


def perc_g_fn(f: Perceptron, i: int) -> bool:
    """Flipping i changes the class at every instance."""
    return perc_g_fn_witness(f, i) is None


# ---------------------------------------------------------------------------
# subset-sum machinery
# ---------------------------------------------------------------------------

def _dp_applicable(weights, offset_terms, budget) -> bool:
    return sum(abs(w) for w in weights) + sum(abs(t) for t in offset_terms) <= budget


def _choose(method: str, weights, extra, budget) -> str:
    if method not in ("auto", "enum", "dp"):
        raise ValueError(f"unknown method {method!r}")
    if method == "auto":
        return "dp" if _dp_applicable(weights, extra, budget) else "enum"
    if method == "dp" and not _dp_applicable(weights, extra, budget):
        raise ValueError(f"scaled weights exceed the DP budget {budget}")
    return method


class _Reach:
    """Reachable subset sums as a bitset, with per-prefix snapshots."""

    def __init__(self, weights: list[int]):
        self.weights = weights
        self.offset = sum(w for w in weights if w < 0)
        bits = 1 << (-self.offset)
        self.prefix = [bits]
        for w in weights:
            bits |= (bits << w) if w >= 0 else (bits >> -w)
            self.prefix.append(bits)
        self.bits = bits

    def first_in(self, lo: int, hi: int) -> Optional[int]:
        """Smallest reachable sum s with lo < s <= hi."""
        a = max(lo + 1 - self.offset, 0)
        b = hi - self.offset
        if b < a:
            return None
        window = (self.bits >> a) & ((1 << (b - a + 1)) - 1)
        if not window:
            return None
        return a + ((window & -window).bit_length() - 1) + self.offset

    def pick(self, s: int) -> list[int]:
        """Positions (into ``weights``) of a subset summing to s."""
        chosen = []
        for j in range(len(self.weights), 0, -1):
            if (self.prefix[j - 1] >> (s - self.offset)) & 1:
                continue
            chosen.append(j - 1)
            s -= self.weights[j - 1]
        assert s == 0
        return chosen[::-1]


def _all_sums(weights: list[int], shift: int = 0) -> np.ndarray:
    """sums[m] = shift + sum of weights[k] over bits k of m."""
    big = sum(abs(w) for w in weights) + abs(shift) >= 1 << 62
    sums = np.full(1, shift, dtype=object if big else np.int64)
    for w in weights:
        sums = np.concatenate([sums, sums + w])
    return sums


def _distribution(weights: list[int], n_total: int) -> tuple[np.ndarray, int]:
    """Multiplicity of every subset sum, indexed by sum - offset."""
    offset = sum(w for w in weights if w < 0)
    span = sum(abs(w) for w in weights)
    dtype = np.int64 if n_total < 62 else object
    dist = np.zeros(span + 1, dtype=dtype)
    dist[-offset] = 1
    for w in weights:
        shifted = np.zeros_like(dist)
        if w >= 0:
            shifted[w:] = dist[:len(dist) - w]
        else:
            shifted[:len(dist) + w] = dist[-w:]
        dist = dist + shifted
    return dist, offset


def _straddle(w: int) -> Optional[tuple[int, int]]:
    """Partial sums t (bias included) at which flipping a weight-w feature
    changes the class, as a half-open interval (lo, hi]."""
    if w > 0:
        return -w, 0
    if w < 0:
        return 0, -w
    return None


# ---------------------------------------------------------------------------
# hard global queries
# ---------------------------------------------------------------------------

def perc_g_csr_counterexample(f: Perceptron, S: FeatureSubset, method: str = "auto",
                              limit: int = ENUM_LIMIT, budget: int = DP_BUDGET
                              ) -> Optional[tuple[Instance, Instance]]:
    """A pair (x, z) with f(x_S; z) != f(x), or None if S is globally sufficient."""
    _check(f, None, S)
    W, B, _ = f.scaled
    n = f.num_features
    members = list(S)
    lo, hi = _int_range(W, S.complement())
    ws = [W[i - 1] for i in members]
    method = _choose(method, ws, [B, hi, lo], budget)
    # insufficient iff some S-sum s satisfies s + B in (-hi, -lo]
    if method == "dp":
        reach = _Reach(ws)
        s = reach.first_in(-hi - B, -lo - B)
        if s is None:
            return None
        on = [members[j] for j in reach.pick(s)]
    else:
        check_desk_scale("perceptron S-assignment enumeration", len(members), limit)
        sums = _all_sums(ws, B)
        hits = np.flatnonzero((sums > -hi) & (sums <= -lo))
        if hits.size == 0:
            return None
        m = int(hits[0])
        on = [members[j] for j in range(len(members)) if m >> j & 1]
    xb = [0] * n
    zb = [0] * n
    for i in on:
        xb[i - 1] = 1
    for i in S.complement():
        xb[i - 1] = int(W[i - 1] > 0)   # x completes to class 1
        zb[i - 1] = int(W[i - 1] < 0)   # z completes to class 0
    return Instance(tuple(xb)), Instance(tuple(zb))


def perc_g_csr(f: Perceptron, S: FeatureSubset, method: str = "auto",
               limit: int = ENUM_LIMIT, budget: int = DP_BUDGET) -> bool:
    return perc_g_csr_counterexample(f, S, method, limit, budget) is None


def perc_flip_witness(f: Perceptron, i: int, method: str = "auto",
                      limit: int = ENUM_LIMIT, budget: int = DP_BUDGET
                      ) -> Optional[Instance]:
    """An instance at which flipping i changes the class, or None."""
    _feature(f, i)
    W, B, _ = f.scaled
    n = f.num_features
    window = _straddle(W[i - 1])
    if window is None:
        return None
    others = [j for j in range(1, n + 1) if j != i]
    ws = [W[j - 1] for j in others]
    method = _choose(method, ws, [B, W[i - 1]], budget)
    if method == "dp":
        reach = _Reach(ws)
        s = reach.first_in(window[0] - B, window[1] - B)
        if s is None:
            return None
        on = [others[j] for j in reach.pick(s)]
    else:
        check_desk_scale("perceptron partial-sum enumeration", len(others), limit)
        sums = _all_sums(ws, B)
        hits = np.flatnonzero((sums > window[0]) & (sums <= window[1]))
        if hits.size == 0:
            return None
        m = int(hits[0])
        on = [others[j] for j in range(len(others)) if m >> j & 1]
    bits = [0] * n
    for j in on:
        bits[j - 1] = 1
    return Instance(tuple(bits))


def perc_g_fr(f: Perceptron, i: int, method: str = "auto",
              limit: int = ENUM_LIMIT, budget: int = DP_BUDGET) -> bool:
    """No attainable partial sum lands in i's straddle interval."""
    return perc_flip_witness(f, i, method, limit, budget) is None


def perc_g_msr(f: Perceptron, k: int, method: str = "auto",
               limit: int = ENUM_LIMIT, budget: int = DP_BUDGET
               ) -> tuple[bool, FeatureSubset]:
    """The unique minimal global sufficient reason: features necessary somewhere."""
    n = f.num_features
    U = FeatureSubset.of(n, [i for i in range(1, n + 1)
                             if perc_flip_witness(f, i, method, limit, budget) is not None])
    return len(U) <= k, U


def perc_fr_witness(f: Perceptron, x: Instance, i: int,
                    limit: int = ENUM_LIMIT) -> Optional[FeatureSubset]:
    """Smallest S containing i with S sufficient and S minus i not."""
    _check(f, x)
    _feature(f, i)
    n = f.num_features
    check_desk_scale("redundancy witness search", n, limit)
    others = [j for j in range(1, n + 1) if j != i]
    for size in range(n):
        for rest in combinations(others, size):
            S = FeatureSubset.of(n, rest + (i,))
            if perc_csr(f, x, S) and not perc_csr(f, x, S.without(i)):
                return S
    return None


def perc_fr(f: Perceptron, x: Instance, i: int, limit: int = ENUM_LIMIT) -> bool:
    return perc_fr_witness(f, x, i, limit) is None


# ---------------------------------------------------------------------------
# counting
# ---------------------------------------------------------------------------

def perc_cc(f: Perceptron, x: Instance, S: FeatureSubset, method: str = "auto",
            limit: int = ENUM_LIMIT, budget: int = DP_BUDGET) -> tuple[int, Fraction]:
    _check(f, x, S)
    W, B, _ = f.scaled
    t = _fixed_part(W, B, x, S)
    free = list(S.complement())
    ws = [W[i - 1] for i in free]
    positive = t + sum(W[i - 1] for i in free if x.bits[i - 1]) > 0
    method = _choose(method, ws, [t], budget)
    if method == "dp":
        dist, offset = _distribution(ws, len(free))
        # sums u with t + u > 0  <=>  u >= -t + 1
        cut = min(max(-t + 1 - offset, 0), len(dist))
        ones = int(dist[cut:].sum())
    else:
        check_desk_scale("completion enumeration", len(free), limit)
        ones = int(np.count_nonzero(_all_sums(ws, t) > 0))
    total = 1 << len(free)
    count = ones if positive else total - ones
    return count, Fraction(count, total)


def perc_g_cc(f: Perceptron, S: FeatureSubset, method: str = "auto",
              limit: int = ENUM_LIMIT, budget: int = DP_BUDGET) -> tuple[int, Fraction]:
    """Sum over assignments a to S of m_a^2 + (2^|free| - m_a)^2.

    m_a counts completions classified 1; every x extending a pairs with
    every completion z, and the pair agrees when both land in one class.
    """
    _check(f, None, S)
    W, B, _ = f.scaled
    n = f.num_features
    fixed_w = [W[i - 1] for i in S]
    free_w = [W[i - 1] for i in S.complement()]
    total = 1 << len(free_w)
    method = _choose(method, fixed_w + free_w, [B], budget)
    count = 0
    if method == "dp":
        dist_s, off_s = _distribution(fixed_w, n)
        dist_f, off_f = _distribution(free_w, n)
        # above[k] = completions with free sum >= k + off_f
        above = np.concatenate([np.cumsum(dist_f[::-1])[::-1], np.zeros(1, dtype=dist_f.dtype)])
        for k in np.flatnonzero(dist_s):
            s = int(k) + off_s + B
            cut = min(max(-s + 1 - off_f, 0), len(dist_f))
            ones = int(above[cut])
            count += int(dist_s[k]) * (ones * ones + (total - ones) ** 2)
    else:
        check_desk_scale("perceptron sum enumeration", max(len(fixed_w), len(free_w)), limit)
        free_sums = sorted(int(v) for v in _all_sums(free_w))
        for s in _all_sums(fixed_w, B):
            s = int(s)
            ones = len(free_sums) - bisect_right(free_sums, -s)
            count += ones * ones + (total - ones) ** 2
    return count, Fraction(count, 1 << (n + len(free_w)))


# ---------------------------------------------------------------------------
# local-to-global counting identity
# ---------------------------------------------------------------------------

def gcc_reduction_model(f: Perceptron, x: Instance, S: FeatureSubset,
                        margin: Fraction = Fraction(1)) -> Perceptron:
    """Perceptron over the free features plus one switch feature.

    With the switch on, the model is pinned to f(x)'s class; with it off,
    it reproduces f on completions of x_S.  ``margin`` keeps the pinned
    score strictly away from zero in the class-1 case; zero scores are
    class 0 here, so a margin of 0 fails when no free weight is positive.
    """
    _check(f, x, S)
    b_new = f.bias + sum((f.weights[i - 1] for i in S if x.bits[i - 1]), Fraction(0))
    free = list(S.complement())
    spread = sum((abs(f.weights[i - 1]) for i in free), Fraction(0))
    if f.evaluate(x):
        switch = spread - b_new + margin
    else:
        switch = -spread - b_new - 1
    return Perceptron(tuple(f.weights[i - 1] for i in free) + (switch,), b_new)


def gcc_reduction_sides(f: Perceptron, x: Instance, S: FeatureSubset,
                        margin: Fraction = Fraction(1), limit: int = ENUM_LIMIT
                        ) -> tuple[int, Optional[int]]:
    """(local count C(S,f,x), value recovered from the global count of f').

    The recovered value is sqrt(C(empty, f')/2 - 4^|free|), or None when
    that quantity is not a perfect square.
    """
    local, _ = perc_cc(f, x, S, method="enum", limit=limit)
    g = gcc_reduction_model(f, x, S, margin)
    total, _ = perc_g_cc(g, FeatureSubset.empty(g.num_features), method="enum", limit=limit)
    free = f.num_features - len(S)
    if total % 2:
        return local, None
    radicand = total // 2 - (1 << (2 * free))
    if radicand < 0:
        return local, None
    root = math.isqrt(radicand)
    return local, root if root * root == radicand else None


def gcc_reduction_identity(f: Perceptron, x: Instance, S: FeatureSubset,
                           margin: Fraction = Fraction(1), limit: int = ENUM_LIMIT) -> bool:
    local, recovered = gcc_reduction_sides(f, x, S, margin, limit)
    return recovered == local
