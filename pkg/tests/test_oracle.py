from fractions import Fraction
from math import comb

import pytest
from hypothesis import given, settings, strategies as st

from globex import oracle
from globex.core import DeskScaleError, FeatureSubset, Instance, complement
from globex.models import Perceptron, evaluate

from conftest import (all_instances, constant_fbdd, inst, majority_perceptron, model_and_args,
                      random_model, sub)


class TestSufficiency:

    def test_local_examples(self, AND, CONST):
        assert oracle.suff_local(AND, inst("11"), sub(2, 1, 2))
        assert not oracle.suff_local(AND, inst("11"), sub(2, 1))
        assert oracle.suff_local(CONST, inst("01"), sub(2))

    def test_global_examples(self, AND, X2):
        assert oracle.suff_global(X2, sub(2, 2))
        assert not oracle.suff_global(AND, sub(2, 1))
        assert oracle.suff_global(AND, sub(2, 1, 2))

    def test_desk_scale(self):
        f = Perceptron((1,) * 25, 0)
        with pytest.raises(DeskScaleError):
            oracle.suff_global(f, FeatureSubset.empty(25))
        limit = oracle.DeskScaleLimit(max_features=3)
        with pytest.raises(DeskScaleError):
            oracle.suff_local(majority_perceptron(4), inst("1111"), sub(4), limit)


class TestContrastive:

    def test_local_examples(self, AND):
        assert oracle.is_contrastive_local(AND, inst("11"), sub(2, 2))
        assert not oracle.is_contrastive_local(AND, inst("00"), sub(2, 2))
        assert not oracle.is_contrastive_local(AND, inst("10"), sub(2))

    def test_global_examples(self, X2, XOR):
        assert oracle.is_contrastive_global(X2, sub(2, 2))
        assert not oracle.is_contrastive_global(X2, sub(2, 1))
        assert oracle.is_contrastive_global(XOR, sub(2, 1))


class TestNecessityRedundancy:

    def test_examples(self, AND, X2, XOR, CONST):
        assert all(oracle.is_necessary_local(XOR, x, 1) for x in all_instances(2))
        assert not oracle.is_necessary_local(AND, inst("00"), 1)
        assert oracle.is_necessary_global(X2, 2)
        assert oracle.is_redundant_global(X2, 1)
        assert not oracle.is_redundant_global(AND, 1)
        assert all(oracle.is_redundant_global(CONST, i) for i in (1, 2))


class TestCounting:

    def test_examples(self, AND):
        assert oracle.count_local(AND, inst("11"), sub(2, 1)) == (1, Fraction(1, 2))
        assert oracle.count_local(AND, inst("01"), sub(2, 1, 2))[1] == 1
        count, c = oracle.count_global(AND, sub(2))
        assert (count, c.numerator, c.denominator) == (10, 5, 8)

    @given(model_and_args())
    @settings(max_examples=100, deadline=None)
    def test_normalization(self, args):
        f, x, S, _ = args
        n = f.num_features
        count, c = oracle.count_local(f, x, S)
        assert 0 <= c <= 1
        assert (c == 1) == oracle.suff_local(f, x, S)
        assert count == c * 2 ** (n - len(S))
        gcount, gc = oracle.count_global(f, S)
        assert 0 <= gc <= 1
        assert gcount == gc * 2 ** (2 * n - len(S))
        assert oracle.count_global(f, FeatureSubset.full(n))[1] == 1


class TestEnumeration:

    @pytest.mark.parametrize("n", [2, 3, 4, 5, 6])
    def test_majority_cardinality(self, n):
        reasons = oracle.enumerate_subset_minimal_suff_local(majority_perceptron(n),
                                                             Instance((1,) * n))
        assert len(reasons) == comb(n, n // 2)
        assert all(len(s) == n // 2 for s in reasons)

    def test_and_reasons(self, AND):
        assert oracle.enumerate_subset_minimal_suff_local(AND, inst("11")).as_lists() == [[1, 2]]
        assert oracle.enumerate_subset_minimal_contrastive_local(AND, inst("11")).as_lists() \
            == [[1], [2]]

    def test_minimum_examples(self, AND, X2, CONST):
        assert oracle.min_suff_local_brute(AND, inst("11")) == sub(2, 1, 2)
        assert oracle.min_suff_global_brute(X2) == sub(2, 2)
        assert oracle.min_suff_global_brute(CONST) == sub(2)
        assert oracle.min_contrastive_global_brute(CONST) is None

    def test_lexicographic_tie_break(self):
        f = majority_perceptron(4)
        assert oracle.min_suff_local_brute(f, inst("1111")) == sub(4, 1, 2)

    @given(model_and_args(max_n=5))
    @settings(max_examples=50, deadline=None)
    def test_subset_minimal_antichain(self, args):
        f, x, _, _ = args
        for family in (oracle.enumerate_subset_minimal_suff_local(f, x),
                       oracle.enumerate_subset_minimal_contrastive_local(f, x)):
            sets = [set(s) for s in family]
            assert all(not (a < b) for a in sets for b in sets)


class TestLaws:

    @given(model_and_args())
    @settings(max_examples=100, deadline=None)
    def test_hereditary(self, args):
        f, x, S, i = args
        if oracle.suff_local(f, x, S):
            bigger = FeatureSubset.of(f.num_features, set(S) | {i})
            assert oracle.suff_local(f, x, bigger)

    @given(model_and_args())
    @settings(max_examples=100, deadline=None)
    def test_definition_duality(self, args):
        f, x, S, _ = args
        assert oracle.suff_local(f, x, S) != oracle.is_contrastive_local(f, x, complement(S))

    @given(model_and_args(max_n=5))
    @settings(max_examples=60, deadline=None)
    def test_necessary_iff_singleton_contrastive(self, args):
        f, x, _, i = args
        assert oracle.is_necessary_local(f, x, i) == oracle.is_contrastive_local(
            f, x, FeatureSubset.of(f.num_features, [i]))

    @pytest.mark.parametrize("kind", ["fbdd", "perceptron", "mlp"])
    @pytest.mark.parametrize("seed", range(8))
    def test_partition(self, kind, seed):
        f = random_model(kind, 4, seed)
        n = f.num_features
        for i in range(1, n + 1):
            somewhere = any(oracle.is_necessary_local(f, x, i) for x in all_instances(n))
            assert somewhere != oracle.is_redundant_global(f, i)

    @pytest.mark.parametrize("kind", ["fbdd", "perceptron", "mlp"])
    @pytest.mark.parametrize("seed", range(8))
    def test_global_reasons_intersect(self, kind, seed):
        f = random_model(kind, 4, seed)
        if len({evaluate(f, x) for x in all_instances(4)}) == 1:
            return
        reasons = list(oracle.enumerate_global_sufficient(f))
        for a in reasons:
            for b in reasons:
                both = FeatureSubset.of(4, set(a) & set(b))
                assert len(both) > 0
                assert oracle.suff_global(f, both)

    def test_constant_model_trivial(self):
        f = constant_fbdd(3, True)
        assert oracle.suff_global(f, sub(3))
        assert all(oracle.is_redundant_global(f, i) for i in (1, 2, 3))
