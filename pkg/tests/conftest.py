import itertools
import sys
from fractions import Fraction

import pytest
from hypothesis import strategies as st

from globex.core import FeatureSubset, Instance
from globex.models import (Perceptron, circuit_to_mlp, parse_formula, random_fbdd, random_mlp,
                           random_perceptron, validate_fbdd)


def fbdd_from_function(n, fn):
    """Complete decision tree testing x1, x2, ... in order, for fn on bit tuples."""
    nodes = []

    def build(prefix):
        if len(prefix) == n:
            return int(bool(fn(prefix)))
        var = len(prefix) + 1
        lo = build(prefix + (0,))
        hi = build(prefix + (1,))
        nid = len(nodes) + 2
        nodes.append((nid, var, lo, hi))
        return nid

    root = build(())
    return validate_fbdd(n, root, nodes, [(0, False), (1, True)])


def and_fbdd():
    # root var1: lo -> leaf0, hi -> (var2: lo -> leaf0, hi -> leaf1)
    return validate_fbdd(2, 2, [(2, 1, 0, 3), (3, 2, 0, 1)], [(0, False), (1, True)])


def x2_fbdd():
    """f = x2 over two features; feature 1 is never tested."""
    return validate_fbdd(2, 2, [(2, 2, 0, 1)], [(0, False), (1, True)])


def x2_after_x1_fbdd():
    """f = x2, but x1 is tested first on both branches."""
    return validate_fbdd(2, 2, [(2, 1, 3, 4), (3, 2, 0, 1), (4, 2, 0, 1)],
                         [(0, False), (1, True)])


def xor_fbdd():
    return validate_fbdd(2, 2, [(2, 1, 3, 4), (3, 2, 0, 1), (4, 2, 1, 0)],
                         [(0, False), (1, True)])


def constant_fbdd(n=2, label=False):
    return validate_fbdd(n, int(label), [], [(0, False), (1, True)])


def majority_perceptron(n):
    """f = 1 iff at least floor(n/2) features are on."""
    return Perceptron((Fraction(1),) * n, -(Fraction(n // 2) - Fraction(1, 2)))


def majority_fbdd(n):
    return fbdd_from_function(n, lambda bits: sum(bits) >= n // 2)


def and_mlp():
    return circuit_to_mlp(parse_formula("x1 & x2"))


def inst(text):
    return Instance(tuple(int(c) for c in text))


def sub(n, *members):
    return FeatureSubset.of(n, members)


def all_instances(n):
    return [Instance(bits) for bits in itertools.product((0, 1), repeat=n)]


def random_model(kind, n, seed):
    if kind == "fbdd":
        return random_fbdd(n, 3 * n, seed)
    if kind == "perceptron":
        return random_perceptron(n, 5, seed)
    return random_mlp([n, 3, 1], 3, seed)


@st.composite
def model_and_args(draw, kinds=("fbdd", "perceptron", "mlp"), max_n=6):
    kind = draw(st.sampled_from(kinds))
    n = draw(st.integers(1, max_n))
    f = random_model(kind, n, draw(st.integers(0, 2**32)))
    x = Instance.from_mask(draw(st.integers(0, (1 << n) - 1)), n)
    S = FeatureSubset.from_mask(draw(st.integers(0, (1 << n) - 1)), n)
    i = draw(st.integers(1, n))
    return f, x, S, i


@pytest.fixture
def AND():
    return and_fbdd()


@pytest.fixture
def X2():
    return x2_fbdd()


@pytest.fixture
def XOR():
    return xor_fbdd()


@pytest.fixture
def CONST():
    return constant_fbdd()


def pytest_terminal_summary(terminalreporter):
    # one PASS/FAIL line per acceptance criterion, when that module ran
    module = sys.modules.get("test_acceptance")
    results = getattr(module, "RESULTS", None)
    if not results:
        return
    terminalreporter.section("acceptance criteria")
    for num in sorted(results):
        r = results[num]
        detail = f" ({r['detail']})" if r["detail"] else ""
        terminalreporter.write_line(f"criterion {num:2d}: {r['status']}  {r['title']}{detail}")
