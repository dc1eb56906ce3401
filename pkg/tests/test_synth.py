from datetime import date

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from basketsom.errors import EmptyInputError
from basketsom.ingest import Basket
from basketsom.synth import (
    PlantedGroup,
    SynthSpec,
    default_spec,
    generate,
    oracle_pair_counts,
    synthetic_catalog,
)
from basketsom.analysis import confidence, support


def baskets_from(matrix):
    return [Basket(i + 1, f"c{i}", date(2011, 9, 1), row) for i, row in enumerate(matrix)]


class TestGenerate:
    def test_degenerate_probabilities(self):
        spec = SynthSpec(50, 6, [PlantedGroup((0, 1), 1.0)], p_bg=0.0, seed=3)
        for b in generate(spec):
            assert b.vector.tolist() == [1, 1, 0, 0, 0, 0]

    def test_deterministic(self):
        spec = default_spec(seed=12, n_baskets=400)
        assert generate(spec) == generate(spec)

    def test_seed_matters(self):
        a = generate(default_spec(seed=1, n_baskets=50))
        b = generate(default_spec(seed=2, n_baskets=50))
        assert a != b

    def test_in_group_rate(self):
        spec = SynthSpec(10_000, 8, [PlantedGroup((0, 1, 2), 0.8)], 0.05, seed=9)
        m = np.stack([b.vector for b in generate(spec)])
        assert abs(m[:, 0].mean() - 0.8) <= 0.02

    @settings(max_examples=50, deadline=None)
    @given(st.integers(0, 2**63), st.integers(1, 40), st.floats(0.0, 0.3))
    def test_shape_and_non_empty(self, seed, n_products, p_bg):
        spec = SynthSpec(30, n_products, [PlantedGroup((0,), 0.5)], p_bg=p_bg, seed=seed)
        for b in generate(spec):
            assert b.vector.shape == (n_products,)
            assert b.vector.any()

    def test_default_spec_groups(self):
        spec = default_spec()
        assert [g.products for g in spec.groups] == [(0, 1, 2), (10, 11, 12), (20, 21, 22)]
        assert (spec.n_baskets, spec.n_products, spec.p_bg) == (5000, 30, 0.05)
        assert all(g.p_in == 0.8 for g in spec.groups)

    @pytest.mark.parametrize(
        "groups,p_bg",
        [
            ([PlantedGroup((0, 9), 0.8)], 0.05),
            ([PlantedGroup((0,), 0.05)], 0.05),
            ([PlantedGroup((), 0.8)], 0.05),
            ([], 0.05),
        ],
    )
    def test_invalid(self, groups, p_bg):
        with pytest.raises(ValueError):
            SynthSpec(10, 5, groups, p_bg)

    def test_catalog_order(self):
        cat = synthetic_catalog(120)
        assert cat.products[0] == "P000"
        assert list(cat.products) == sorted(cat.products)


class TestOracle:
    def test_single_basket(self):
        counts = oracle_pair_counts(baskets_from(np.array([[1, 1, 0]])))
        assert counts[(0, 1)] == 1
        assert counts[(0, 2)] == 0 and counts[(1, 2)] == 0
        assert counts[(0, 0)] == 1 and counts[(2, 2)] == 0

    def test_disjoint_singletons(self):
        counts = oracle_pair_counts(baskets_from(np.eye(4, dtype=int)))
        assert all(v == 0 for (i, j), v in counts.items() if i != j)

    def test_empty(self):
        with pytest.raises(EmptyInputError):
            oracle_pair_counts([])

    def test_twenty_basket_equivalence(self):
        rng = np.random.default_rng(20)
        m = rng.integers(0, 2, size=(20, 6))
        m[m.sum(axis=1) == 0, 0] = 1
        b = baskets_from(m)
        cat = synthetic_catalog(6)
        counts = oracle_pair_counts(b)
        for a in range(6):
            assert support(b, cat, cat.products[a]) == counts[(a, a)] / 20
            for c in range(6):
                if a != c and counts[(a, a)]:
                    expected = counts[(min(a, c), max(a, c))] / counts[(a, a)]
                    assert confidence(b, cat, cat.products[a], cat.products[c]) == expected

    def test_pair_bounded_by_singles(self):
        b = generate(default_spec(seed=7, n_baskets=300))
        counts = oracle_pair_counts(b)
        for (i, j), v in counts.items():
            assert v <= min(counts[(i, i)], counts[(j, j)])
