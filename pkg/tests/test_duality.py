from itertools import combinations

import pytest
from hypothesis import given, settings, strategies as st

from globex import duality, generic_solver, oracle
from globex.core import FeatureSubset
from globex.duality import BudgetExceeded, SubsetFamily, minimum_hitting_set

from conftest import majority_fbdd, random_model, sub


def family(n, *sets):
    return SubsetFamily.of(n, sets)


class TestMinimumHittingSet:

    def test_examples(self):
        assert minimum_hitting_set(family(6, {1, 2}, {2, 3, 4}, {4, 5, 6})) == sub(6, 2, 4)
        assert minimum_hitting_set(family(3)) == sub(3)
        assert minimum_hitting_set(family(3, {3})) == sub(3, 3)

    def test_empty_member_unhittable(self):
        with pytest.raises(ValueError):
            minimum_hitting_set(family(2, set(), {1}))

    def test_deduplicates(self):
        assert len(family(3, {1, 2}, {2, 1}, {3})) == 2

    def test_budget(self):
        n = 16
        sets = [set(c) for c in combinations(range(1, n + 1), 3)]
        with pytest.raises(BudgetExceeded):
            minimum_hitting_set(SubsetFamily.of(n, sets), budget=10)

    @given(st.integers(1, 7).flatmap(lambda n: st.tuples(
        st.just(n), st.lists(st.integers(1, 2 ** n - 1), max_size=8))))
    @settings(max_examples=150, deadline=None)
    def test_exhaustive_minimality(self, args):
        n, masks = args
        fam = SubsetFamily(tuple(FeatureSubset.from_mask(m, n) for m in masks), n)
        h = minimum_hitting_set(fam)
        assert duality.hits_all(h, fam)
        smallest = min(bin(m).count("1") for m in range(1 << n)
                       if all(m & s for s in masks))
        assert len(h) == smallest


class TestGlobalViaDuality:

    def test_msr_examples(self, AND, X2, CONST):
        assert duality.g_msr_via_duality(AND) == sub(2, 1, 2)
        assert duality.g_msr_via_duality(X2) == sub(2, 2)
        assert duality.g_msr_via_duality(CONST) == sub(2)

    def test_contrastive_examples(self, XOR, X2, CONST):
        assert duality.g_contrastive_via_duality(XOR) == sub(2, 1)
        assert duality.g_contrastive_via_duality(X2) == sub(2, 2)
        assert duality.g_contrastive_via_duality(CONST) is None

    def test_majority_contrastive_cardinality(self):
        f = majority_fbdd(4)
        got = duality.g_contrastive_via_duality(f)
        assert oracle.is_contrastive_global(f, got)
        assert len(got) == len(oracle.min_contrastive_global_brute(f))

    @pytest.mark.parametrize("kind", ["fbdd", "perceptron", "mlp"])
    @pytest.mark.parametrize("seed", range(6))
    def test_three_routes_agree(self, kind, seed):
        f = random_model(kind, 5, seed)
        expected = oracle.min_suff_global_brute(f)
        assert duality.g_msr_via_duality(f) == expected
        assert generic_solver.subset_minimal_global(f) == expected
        c = duality.g_contrastive_via_duality(f)
        best = oracle.min_contrastive_global_brute(f)
        if best is None:
            assert c is None
        else:
            assert oracle.is_contrastive_global(f, c) and len(c) == len(best)


class TestIntersectionDuality:

    def test_and(self, AND):
        assert duality.check_intersection_duality(AND)

    @pytest.mark.parametrize("kind", ["fbdd", "perceptron"])
    def test_random_six_features(self, kind):
        assert duality.check_intersection_duality(random_model(kind, 6, 3))
