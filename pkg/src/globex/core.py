"""Value types shared by every query: instances, feature subsets, rationals.

Features are numbered 1..n throughout.  A bitstring such as ``"101"`` is
read left to right, so its first character is feature 1.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Iterator

Rational = Fraction

_BITS = re.compile(r"[01]+")


class DimensionError(ValueError):
    """Raised when objects over different feature counts are combined."""


class ParseError(ValueError):
    """Raised on malformed textual input (bitstrings, subsets, rationals)."""


class DeskScaleError(RuntimeError):
    """An exhaustive procedure was asked to run beyond its configured bound."""

    def __init__(self, what: str, size: int, limit: int):
        self.what = what
        self.size = size
        self.limit = limit
        super().__init__(f"{what}: size {size} exceeds desk-scale limit {limit}")


def check_desk_scale(what: str, size: int, limit: int) -> None:
    if size > limit:
        raise DeskScaleError(what, size, limit)


@dataclass(frozen=True)
class Instance:
    """A full boolean assignment; ``bits[k]`` holds feature ``k + 1``."""

    bits: tuple[int, ...]

    def __post_init__(self):
        bits = tuple(int(b) for b in self.bits)
        if any(b not in (0, 1) for b in bits):
            raise ParseError(f"instance bits must be 0/1, got {self.bits!r}")
        object.__setattr__(self, "bits", bits)

    def __len__(self) -> int:
        return len(self.bits)

    def __iter__(self) -> Iterator[int]:
        return iter(self.bits)

    def __str__(self) -> str:
        return "".join(str(b) for b in self.bits)

    def value(self, i: int) -> int:
        return self.bits[i - 1]

    def flip(self, i: int) -> "Instance":
        if not 1 <= i <= len(self.bits):
            raise DimensionError(f"feature {i} out of range 1..{len(self.bits)}")
        bits = list(self.bits)
        bits[i - 1] ^= 1
        return Instance(tuple(bits))

    @property
    def mask(self) -> int:
        """Integer encoding with feature i stored at bit i-1."""
        return sum(b << k for k, b in enumerate(self.bits))

    @classmethod
    def from_mask(cls, mask: int, n: int) -> "Instance":
        return cls(tuple((mask >> k) & 1 for k in range(n)))

    @classmethod
    def zeros(cls, n: int) -> "Instance":
        return cls((0,) * n)

    @classmethod
    def ones(cls, n: int) -> "Instance":
        return cls((1,) * n)


def parse_instance(text: str) -> Instance:
    if not isinstance(text, str) or not _BITS.fullmatch(text):
        raise ParseError(f"instance must match [01]+, got {text!r}")
    return Instance(tuple(int(c) for c in text))


@dataclass(frozen=True)
class FeatureSubset:
    """A set of 1-based feature indices over the universe {1..universe_size}."""

    members: tuple[int, ...]
    universe_size: int

    def __post_init__(self):
        members = tuple(sorted(set(int(i) for i in self.members)))
        if self.universe_size < 0:
            raise DimensionError("universe size must be nonnegative")
        bad = [i for i in members if not 1 <= i <= self.universe_size]
        if bad:
            raise DimensionError(
                f"features {bad} outside 1..{self.universe_size}")
        object.__setattr__(self, "members", members)

    @classmethod
    def of(cls, n: int, members: Iterable[int] = ()) -> "FeatureSubset":
        return cls(tuple(members), n)

    @classmethod
    def full(cls, n: int) -> "FeatureSubset":
        return cls(tuple(range(1, n + 1)), n)

    @classmethod
    def empty(cls, n: int) -> "FeatureSubset":
        return cls((), n)

    @classmethod
    def from_mask(cls, mask: int, n: int) -> "FeatureSubset":
        return cls(tuple(k + 1 for k in range(n) if (mask >> k) & 1), n)

    @property
    def mask(self) -> int:
        m = 0
        for i in self.members:
            m |= 1 << (i - 1)
        return m

    def __len__(self) -> int:
        return len(self.members)

    def __iter__(self) -> Iterator[int]:
        return iter(self.members)

    def __contains__(self, i: object) -> bool:
        return i in self.members

    def __str__(self) -> str:
        return ",".join(map(str, self.members)) if self.members else "none"

    def complement(self) -> "FeatureSubset":
        inside = set(self.members)
        return FeatureSubset(
            tuple(i for i in range(1, self.universe_size + 1) if i not in inside),
            self.universe_size)

    def without(self, i: int) -> "FeatureSubset":
        return FeatureSubset(tuple(j for j in self.members if j != i),
                             self.universe_size)

    def with_feature(self, i: int) -> "FeatureSubset":
        return FeatureSubset(self.members + (i,), self.universe_size)

    def issubset(self, other: "FeatureSubset") -> bool:
        return set(self.members) <= set(other.members)

    def intersects(self, other: "FeatureSubset") -> bool:
        return bool(set(self.members) & set(other.members))


def complement(S: FeatureSubset) -> FeatureSubset:
    return S.complement()


def parse_subset(text: str, n: int) -> FeatureSubset:
    """Parse ``"1,3"`` (or ``"none"`` for the empty set) over universe n."""
    text = text.strip()
    if text == "none":
        return FeatureSubset.empty(n)
    try:
        members = [int(tok) for tok in text.split(",")]
    except ValueError:
        raise ParseError(f"subset must be comma-separated indices or 'none', got {text!r}")
    if len(set(members)) != len(members):
        raise ParseError(f"duplicate feature in subset {text!r}")
    return FeatureSubset.of(n, members)


def compose(x: Instance, z: Instance, S: FeatureSubset) -> Instance:
    """Take features in S from x and every other feature from z."""
    if not len(x) == len(z) == S.universe_size:
        raise DimensionError(
            f"compose over mismatched sizes {len(x)}, {len(z)}, {S.universe_size}")
    inside = set(S.members)
    return Instance(tuple(xb if k + 1 in inside else zb
                          for k, (xb, zb) in enumerate(zip(x.bits, z.bits))))


def parse_rational(text) -> Fraction:
    """Accept ``"p/q"``, an integer string, or an int."""
    if isinstance(text, bool):
        raise ParseError(f"not a rational: {text!r}")
    if isinstance(text, int):
        return Fraction(text)
    if not isinstance(text, str) or not re.fullmatch(r"\s*-?\d+(\s*/\s*\d+)?\s*", text):
        raise ParseError(f"rational must look like 'p/q' or an integer, got {text!r}")
    try:
        return Fraction(text.replace(" ", ""))
    except ZeroDivisionError:
        raise ParseError(f"zero denominator in {text!r}")


def format_rational(q: Fraction) -> str:
    return str(q.numerator) if q.denominator == 1 else f"{q.numerator}/{q.denominator}"
