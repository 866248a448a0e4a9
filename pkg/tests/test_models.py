import json
from fractions import Fraction

import pytest
from hypothesis import given, settings, strategies as st

from globex.core import DimensionError, Instance
from globex.models import (Perceptron, SchemaError, ValidationError, circuit_to_mlp, evaluate,
                           model_from_json, parse_formula, parse_model, random_fbdd,
                           random_mlp, random_perceptron, serialize_model, validate_fbdd)

from conftest import all_instances, and_fbdd, inst


class TestEvaluate:

    def test_and_fbdd(self, AND):
        assert [evaluate(AND, x) for x in all_instances(2)] == [False, False, False, True]

    def test_perceptron_strict_threshold(self):
        p = Perceptron((1,), Fraction(-1, 2))
        assert evaluate(p, inst("0")) is False
        assert evaluate(p, inst("1")) is True
        # a score of exactly zero is class 0
        assert evaluate(Perceptron((1,), -1), inst("1")) is False

    def test_dimension_mismatch(self, AND):
        with pytest.raises(DimensionError):
            evaluate(AND, inst("101"))


class TestValidateFbdd:

    def test_accepts_and(self):
        assert and_fbdd().num_features == 2

    def test_read_once_violation(self):
        with pytest.raises(ValidationError, match="read-once|twice"):
            validate_fbdd(2, 2, [(2, 1, 0, 3), (3, 1, 0, 1)], [(0, False), (1, True)])

    def test_dangling(self):
        with pytest.raises(ValidationError, match="99"):
            validate_fbdd(2, 2, [(2, 1, 0, 99)], [(0, False), (1, True)])

    def test_cycle(self):
        with pytest.raises(ValidationError, match="cycle"):
            validate_fbdd(3, 2, [(2, 1, 0, 3), (3, 2, 2, 1)], [(0, False), (1, True)])

    def test_var_range(self):
        with pytest.raises(ValidationError):
            validate_fbdd(2, 2, [(2, 3, 0, 1)], [(0, False), (1, True)])

    @given(st.integers(1, 8), st.integers(1, 30), st.integers(0, 2**63))
    @settings(max_examples=60, deadline=None)
    def test_random_fbdd_single_path(self, n, size, seed):
        f = random_fbdd(n, size, seed)
        for m in range(1 << n):
            x = Instance.from_mask(m, n)
            # walk by hand: exactly one path, never repeating a variable
            nid, seen = f.root, set()
            while not f.is_leaf(nid):
                v = f.node(nid)
                assert v.var not in seen
                seen.add(v.var)
                nid = v.hi if x.value(v.var) else v.lo
            assert f.label(nid) == f.evaluate(x)


class TestCircuitToMlp:

    def test_not(self):
        m = circuit_to_mlp(parse_formula("~x1"))
        assert [evaluate(m, x) for x in all_instances(1)] == [True, False]

    def test_and(self):
        m = circuit_to_mlp(parse_formula("x1 & x2"))
        assert [evaluate(m, x) for x in all_instances(2)] == [False, False, False, True]

    def test_excluded_middle_is_constant(self):
        m = circuit_to_mlp(parse_formula("x1 | ~x1"))
        assert all(evaluate(m, x) for x in all_instances(1))

    def test_precedence(self):
        c = parse_formula("x1 | x2 & x3")
        assert c.evaluate(inst("100")) and not c.evaluate(inst("010"))

    @given(st.integers(1, 5), st.integers(0, 2**32), st.integers(1, 4))
    @settings(max_examples=80, deadline=None)
    def test_soundness_and_binary_wires(self, n, seed, depth):
        import random
        from globex.reductions import random_formula
        c = parse_formula(random_formula(n, depth, random.Random(seed)), n)
        m = circuit_to_mlp(c)
        for x in all_instances(n):
            assert evaluate(m, x) == c.evaluate(x)
            pre = m.forward(x)
            for layer, z in zip(m.layers[:-1], pre[:-1]):
                assert all(max(v, 0) in (0, 1) for v in z)
            assert pre[-1][0] in (0, 1)

    @pytest.mark.parametrize("text", ["x1 &", "x0", "(x1", "x1 ^ x2", ""])
    def test_bad_formula(self, text):
        with pytest.raises(ValueError):
            parse_formula(text)


class TestRandomGeneration:

    def test_fbdd_deterministic(self):
        assert serialize_model(random_fbdd(4, 10, 7)) == serialize_model(random_fbdd(4, 10, 7))

    def test_perceptron_bounds(self):
        p = random_perceptron(3, 10, 1)
        for q in p.weights + (p.bias,):
            assert abs(q.numerator) <= 10 and q.denominator <= 10

    def test_mlp_shape(self):
        m = random_mlp([3, 2, 1], 5, 9)
        assert m.input_width == 3
        assert [len(layer.bias) for layer in m.layers] == [2, 1]
        assert [l.activation for l in m.layers] == ["relu", "step"]

    def test_bad_parameters(self):
        with pytest.raises(ValueError):
            random_fbdd(0, 5, 1)
        with pytest.raises(ValueError):
            random_mlp([3, 2], 5, 1)


class TestSerialization:

    def test_and_round_trip(self, AND):
        assert parse_model(serialize_model(AND)) == AND

    def test_rational_strings(self):
        p = parse_model(json.dumps({"type": "perceptron", "weights": ["1/2", "-3"], "bias": "0"}))
        assert p.weights == (Fraction(1, 2), Fraction(-3))

    def test_missing_root(self):
        with pytest.raises(SchemaError, match=r"\$\.root"):
            model_from_json({"type": "fbdd", "num_features": 1, "nodes": [], "leaves": []})

    def test_path_in_error(self):
        with pytest.raises(SchemaError, match=r"\$\.weights\[1\]"):
            parse_model('{"type": "perceptron", "weights": ["1", "x"], "bias": "0"}')

    def test_canonical(self, AND):
        text = serialize_model(AND).decode()
        assert text.endswith("\n") and "\n" not in text[:-1]
        assert json.dumps(json.loads(text), sort_keys=True) + "\n" == text

    @given(st.sampled_from(["fbdd", "perceptron", "mlp"]), st.integers(1, 6),
           st.integers(0, 2**32))
    @settings(max_examples=60, deadline=None)
    def test_lossless(self, kind, n, seed):
        from conftest import random_model
        f = random_model(kind, n, seed)
        data = serialize_model(f)
        g = parse_model(data)
        assert serialize_model(g) == data
        assert all(evaluate(f, x) == evaluate(g, x) for x in all_instances(n))
