"""Closed-form moment formulas against hand values and cross-identities."""

import json

import numpy as np
import pytest

from graphon_spectra import (
    CapacityError,
    ConstantGraphon,
    Profile,
    ProductGraphon,
    SimpleGraph,
    StepGraphon,
    adjacency_moment,
    catalan,
    diagonal_moment,
    hom_density,
    laplacian_moment,
    moment_table,
)
from graphon_spectra.moments import canonical_source
from graphon_spectra.errors import ValidationError

SQRT = ProductGraphon(Profile.sqrt())
ONES = ConstantGraphon(1.0)


def random_step(n, seed):
    rng = np.random.default_rng(seed)
    v = rng.random((n, n))
    return StepGraphon((v + v.T) / 2.0)


class TestAdjacencyMoments:
    def test_second_moment_flat(self):
        assert adjacency_moment(2, ONES) == 1.0

    def test_fourth_moment_flat(self):
        assert adjacency_moment(4, ONES) == 2.0

    def test_fourth_moment_sqrt(self):
        # both planar trees on three vertices share the path density 2/9
        assert adjacency_moment(4, SQRT) == pytest.approx(4.0 / 9.0, abs=1e-14)

    def test_catalan_sequence(self):
        for k in range(1, 7):
            assert adjacency_moment(2 * k, ONES) == pytest.approx(catalan(k), abs=1e-12)

    def test_odd_orders_zero(self):
        assert adjacency_moment(3, SQRT) == 0.0
        assert adjacency_moment(7, ONES) == 0.0

    def test_capacity(self):
        with pytest.raises(CapacityError):
            adjacency_moment(22, ONES)


class TestLaplacianMoments:
    def test_second_moment_flat(self):
        assert laplacian_moment(2, ONES) == pytest.approx(2.0, abs=1e-12)

    def test_fourth_moment_flat(self):
        assert laplacian_moment(4, ONES) == pytest.approx(9.0, abs=1e-12)

    def test_fourth_moment_sqrt(self):
        assert laplacian_moment(4, SQRT) == pytest.approx(2.0, abs=1e-12)

    def test_odd_orders_zero(self):
        for order in (1, 3, 5, 7):
            assert laplacian_moment(order, SQRT) == 0.0

    def test_second_moment_is_twice_edge_density(self):
        for w in [SQRT, random_step(3, 0), ConstantGraphon(0.4)]:
            expected = 2.0 * hom_density(SimpleGraph.single_edge(), w)
            assert laplacian_moment(2, w) == pytest.approx(expected, abs=1e-12)

    def test_fourth_moment_is_nine_path_densities(self):
        for w in [SQRT, random_step(4, 1), ConstantGraphon(0.4)]:
            expected = 9.0 * hom_density(SimpleGraph.path(3), w)
            assert laplacian_moment(4, w) == pytest.approx(expected, abs=1e-12)

    def test_dominates_adjacency(self):
        for w in [ONES, SQRT, random_step(3, 2)]:
            for order in (2, 4, 6):
                assert laplacian_moment(order, w) >= adjacency_moment(order, w) - 1e-12

    def test_vanishes_on_zero_kernel(self):
        zero = ConstantGraphon(0.0)
        for order in (2, 4, 6):
            assert laplacian_moment(order, zero) == 0.0
            assert adjacency_moment(order, zero) == 0.0

    def test_constant_scaling(self):
        c = 0.3
        w = ConstantGraphon(c)
        for order in (2, 4, 6):
            expected = c ** (order // 2) * laplacian_moment(order, ONES)
            assert laplacian_moment(order, w) == pytest.approx(expected, abs=1e-12)

    def test_all_diagonal_word_contribution_matches_diagonal_moment(self):
        # the pure-Y word decorates the single vertex into a star with
        # weight gaussian_moment(order); that is exactly diagonal_moment
        from graphon_spectra import TraceWord, decorate_tree, enumerate_trees, gaussian_weight

        for order in (2, 4, 6):
            for w in [SQRT, random_step(3, 3)]:
                tree = enumerate_trees(0)[0]
                decorated = decorate_tree(tree, TraceWord.from_word("Y" * order))
                contribution = gaussian_weight(decorated) * hom_density(decorated.as_graph(), w)
                assert contribution == pytest.approx(diagonal_moment(order, w), abs=1e-12)

    def test_moment_growth_stays_bounded(self):
        values = [
            laplacian_moment(order, ONES) ** (1.0 / order) / order
            for order in (2, 4, 6, 8, 10, 12)
        ]
        assert max(values) < 2.0

    def test_capacity(self):
        with pytest.raises(CapacityError):
            laplacian_moment(14, ONES)


class TestMonteCarloCrossCheck:
    def test_step_graphon_moments_match_sampled_spectra(self):
        # end-to-end: word/tree/decoration formulas vs the eigenvalues of
        # the decoupled Gaussian model they describe
        from graphon_spectra import sample_decoupled_model
        from graphon_spectra.ensembles import derive_seed

        w = random_step(3, 3)
        pooled = []
        for trial in range(2):
            matrix = sample_decoupled_model(w, 2000, seed=derive_seed(999, 0, trial))
            pooled.append(np.linalg.eigvalsh(matrix))
        eigs = np.concatenate(pooled)
        for order, tol in ((2, 0.05), (4, 0.07), (6, 0.10)):
            theory = laplacian_moment(order, w)
            empirical = float(np.mean(eigs**order))
            assert empirical == pytest.approx(theory, rel=tol)


class TestDiagonalMoments:
    def test_flat_kernel(self):
        assert diagonal_moment(2, ONES) == 1.0
        assert diagonal_moment(4, ONES) == 3.0

    def test_sqrt_kernel(self):
        assert diagonal_moment(4, SQRT) == pytest.approx(2.0 / 3.0, abs=1e-14)

    def test_odd_zero(self):
        assert diagonal_moment(3, SQRT) == 0.0


class TestMomentTable:
    def test_odd_laplacian_orders_are_zero(self):
        table = moment_table([1, 3, 5], ONES, "laplacian")
        assert table.entries == {1: 0.0, 3: 0.0, 5: 0.0}

    def test_worked_flat_values(self):
        table = moment_table([2, 4], ONES, "laplacian")
        assert table.entries[2] == pytest.approx(2.0, abs=1e-12)
        assert table.entries[4] == pytest.approx(9.0, abs=1e-12)

    def test_adjacency_entry(self):
        table = moment_table([2], ONES, "adjacency")
        assert table.entries == {2: 1.0}

    def test_json_shape(self):
        table = moment_table([2, 4], ONES, "laplacian")
        data = json.loads(table.to_json_str())
        assert data["source"] == "laplacian"
        assert data["moments"] == {"2": 2.0, "4": 9.0}
        assert data["graphon"] == {"type": "constant", "value": 1.0}

    def test_source_alias(self):
        assert canonical_source("yn") == "diagonal"
        table = moment_table([2], ONES, "yn")
        assert table.source == "diagonal"
        with pytest.raises(ValidationError):
            canonical_source("nope")
