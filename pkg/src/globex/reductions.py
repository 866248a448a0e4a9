"""Hardness-reduction gadgets, used as differential test vectors.

Subset sum maps to global sufficiency of a perceptron: with weights
``(z_1, ..., z_n, 1/2)`` and bias ``-(T + 1/4)``, fixing the first n features
decides the class unless they sum to exactly T, in which case the extra
half-weight feature flips it.  Tautology maps to global necessity of an
MLP: in ``psi & x_{n+1}`` the last feature matters at every instance iff
psi is always true.
"""

from __future__ import annotations

import random
from dataclasses import dataclass
from fractions import Fraction

from globex.core import Instance, check_desk_scale
from globex.models import (AND, INPUT, NOT, BoolCircuit, CircuitBuilder, Mlp, Perceptron,
                           circuit_to_mlp)

TAUT_LIMIT = 20


@dataclass(frozen=True)
class SspInstance:
    values: tuple[int, ...]
    target: int

    def __post_init__(self):
        object.__setattr__(self, "values", tuple(int(v) for v in self.values))
        if not self.values:
            raise ValueError("subset sum needs at least one value")
        if any(v <= 0 for v in self.values) or self.target <= 0:
            raise ValueError("subset-sum values and target must be positive")


def subset_sum_feasible(ssp: SspInstance) -> bool:
    """Does some subset of the values add up to the target?"""
    reach = 1
    for v in ssp.values:
        reach |= reach << v
    return bool(reach >> ssp.target & 1)


def ssp_gadget(ssp: SspInstance) -> Perceptron:
    return Perceptron(tuple(Fraction(v) for v in ssp.values) + (Fraction(1, 2),),
                      -(ssp.target + Fraction(1, 4)))


def ssp_expectations(ssp: SspInstance) -> dict[str, bool]:
    """Expected answers for G-CSR on the first n features and G-MSR with k = n.

    Both hold iff no subset hits the target.  When one does, every feature
    is necessary at some instance, so the minimal global reason is all n+1.
    """
    ok = not subset_sum_feasible(ssp)
    return {"g-csr": ok, "g-msr": ok}


def random_ssp(n: int, max_value: int, rng: random.Random) -> SspInstance:
    values = tuple(rng.randint(1, max_value) for _ in range(n))
    return SspInstance(values, rng.randint(1, sum(values) + 1))


def is_tautology(c: BoolCircuit, limit: int = TAUT_LIMIT) -> bool:
    check_desk_scale("tautology enumeration", c.num_inputs, limit)
    n = c.num_inputs
    return all(c.evaluate(Instance.from_mask(m, n)) for m in range(1 << n))


def conjoin_fresh(c: BoolCircuit) -> BoolCircuit:
    """psi & x_{n+1} over n+1 inputs."""
    b = CircuitBuilder(c.num_inputs + 1)
    wire = {}
    for g in c.gates:
        if g.kind == INPUT:
            wire[g.id] = b.input(g.var)
        elif g.kind == NOT:
            wire[g.id] = b.neg(wire[g.operands[0]])
        elif g.kind == AND:
            wire[g.id] = b.conj(wire[g.operands[0]], wire[g.operands[1]])
        else:
            wire[g.id] = b.disj(wire[g.operands[0]], wire[g.operands[1]])
    return b.build(b.conj(wire[c.output], b.input(c.num_inputs + 1)))


def taut_gadget(c: BoolCircuit, limit: int = TAUT_LIMIT) -> tuple[Mlp, dict[str, bool]]:
    """MLP for psi & x_{n+1} and the expected G-FN answer for feature n+1."""
    taut = is_tautology(c, limit)
    return circuit_to_mlp(conjoin_fresh(c)), {"g-fn": taut}


def random_formula(n: int, depth: int, rng: random.Random) -> str:
    """Random formula text over x1..xn."""
    def build(d: int) -> str:
        r = rng.random()
        if d == 0 or r < 0.25:
            lit = f"x{rng.randint(1, n)}"
            return f"~{lit}" if rng.random() < 0.4 else lit
        if r < 0.35:
            return f"~({build(d - 1)})"
        op = "&" if rng.random() < 0.5 else "|"
        return f"({build(d - 1)} {op} {build(d - 1)})"
    return build(depth)


def random_taut_candidate(n: int, depth: int, rng: random.Random) -> str:
    """Random formula, disjoined half the time with a negated formula so that
    tautologies are common enough to exercise both answers."""
    body = random_formula(n, depth, rng)
    if rng.random() < 0.5:
        other = body if rng.random() < 0.5 else random_formula(n, depth, rng)
        return f"({body}) | ~({other})"
    return body
