import math
from typing import Callable

import numpy as np
import pytest
from pytest_mock import MockerFixture

from csbm_attention_lab import diagnostics
from csbm_attention_lab.attention import (
    attention_coefficients,
    build_clean_spec,
    uniform_spec,
)
from csbm_attention_lab.diagnostics import (
    check_class_degree_concentration,
    check_degree_concentration,
    check_gamma_ratio_bounds,
    check_gamma_uniformity,
    check_sum_exp_bounds,
    check_sum_sq_gamma,
    check_uncommon_neighbors,
    class_exp_sums,
    class_neighbor_counts,
    density_precondition_holds,
    gamma_class_masses,
)
from csbm_attention_lab.models.attention import AttentionKind, AttentionSpec
from csbm_attention_lab.models.csbm import CsbmParams, GraphSample
from csbm_attention_lab.sampler import sample_csbm

ParamsFactory = Callable[..., CsbmParams]
SampleFactory = Callable[..., GraphSample]


class TestDegreeConcentration:
    def test_complete_graph(self, make_params: ParamsFactory) -> None:
        params = make_params(n=20, p=1.0, q=1.0)
        report = check_degree_concentration(sample_csbm(params, 0), params)
        assert report.center == 20.0
        assert report.max_deviation == pytest.approx(1 / 20)
        assert report.violation_count == 0
        assert report.passed
        rate = math.sqrt(math.log(20) / 40)
        assert report.observed_constants["c_observed"] == pytest.approx(0.05 / rate)

    def test_empty_graph_is_degenerate(self, make_params: ParamsFactory) -> None:
        params = make_params(n=20, p=0.0, q=0.0)
        report = check_degree_concentration(sample_csbm(params, 0), params)
        assert report.degenerate
        assert not report.passed

    def test_sampled_graph_passes(self, make_params: ParamsFactory) -> None:
        params = make_params()
        report = check_degree_concentration(sample_csbm(params, 3), params)
        assert report.observations == 400
        assert report.passed
        assert set(report.quantiles) == {"q05", "q50", "q95"}

    def test_report_is_reproducible(self, make_params: ParamsFactory) -> None:
        params = make_params(n=100)
        first = check_degree_concentration(sample_csbm(params, 9), params)
        second = check_degree_concentration(sample_csbm(params, 9), params)
        assert first == second


class TestClassDegreeConcentration:
    def test_class_neighbor_counts(self, star_sample: GraphSample) -> None:
        same, other = class_neighbor_counts(star_sample)
        assert same.tolist() == [2.0, 1.0, 1.0, 0.0, 0.0]
        assert other.tolist() == [2.0, 0.0, 0.0, 1.0, 1.0]

    def test_disconnected_classes(self, make_params: ParamsFactory) -> None:
        params = make_params(n=20, p=1.0, q=0.0)
        sample = sample_csbm(params, 1)
        same, other = class_neighbor_counts(sample)
        assert (same == 9).all()
        assert (other == 0).all()

        report = check_class_degree_concentration(sample, params)
        assert report.degenerate
        assert report.violation_count == 0
        assert report.passed
        assert report.max_deviation == pytest.approx(0.1)

    def test_zero_centre_counts_any_neighbour(
        self, make_params: ParamsFactory
    ) -> None:
        sampled_with = make_params(n=20, p=0.5, q=0.5)
        checked_against = make_params(n=20, p=0.5, q=0.0)
        report = check_class_degree_concentration(
            sample_csbm(sampled_with, 2), checked_against
        )
        assert report.degenerate
        assert report.violation_count > 0
        assert not report.passed

    def test_sampled_graph_passes(self, make_params: ParamsFactory) -> None:
        params = make_params()
        report = check_class_degree_concentration(sample_csbm(params, 4), params)
        assert report.observations == 800
        assert not report.degenerate
        assert report.passed


class TestUncommonNeighbors:
    def test_density_precondition(self, make_params: ParamsFactory) -> None:
        assert density_precondition_holds(make_params(n=400, p=0.4, q=0.33))
        assert not density_precondition_holds(make_params(n=20, p=0.4, q=0.33))

    def test_complete_graph_is_vacuous(
        self, make_params: ParamsFactory, mocker: MockerFixture
    ) -> None:
        mock_logger = mocker.patch.object(diagnostics, "logger")
        params = make_params(n=20, p=1.0, q=1.0)
        report = check_uncommon_neighbors(sample_csbm(params, 0), params)
        assert report.degenerate
        assert report.passed
        assert report.violation_count == 0
        assert report.max_deviation is None
        mock_logger.warning.assert_called()

    def test_disconnected_classes(self, make_params: ParamsFactory) -> None:
        params = make_params(n=20, p=1.0, q=0.0)
        report = check_uncommon_neighbors(
            sample_csbm(params, 0), params, exact=True
        )
        assert report.observations == 190
        assert report.degenerate
        assert report.violation_count == 0
        assert report.passed

    def test_exact_mode_matches_neighbour_sets(
        self, make_params: ParamsFactory
    ) -> None:
        params = make_params(n=12, p=0.5, q=0.2)
        sample = sample_csbm(params, 5)
        report = check_uncommon_neighbors(sample, params, exact=True)
        assert report.observations == 66

        neighbours = [set(sample.adjacency.neighbors(i).tolist()) for i in range(12)]
        expected = 0
        for i in range(12):
            for j in range(i + 1, 12):
                same = sample.labels[i] == sample.labels[j]
                base = (
                    params.p + params.q - params.p**2 - params.q**2
                    if same
                    else params.p + params.q - 2 * params.p * params.q
                )
                delta = 3 * math.sqrt(math.log(12) / (12 * base))
                bound = 6 * base * (1 - delta)
                expected += len(neighbours[i] ^ neighbours[j]) < bound
        assert report.violation_count == expected

    def test_sampled_pairs(self, make_params: ParamsFactory) -> None:
        params = make_params()
        sample = sample_csbm(params, 6)
        report = check_uncommon_neighbors(sample, params, 150, seed=3)
        assert report.observations == 150
        assert report.passed
        assert report == check_uncommon_neighbors(sample, params, 150, seed=3)

    def test_exact_mode_falls_back_to_sampling(
        self, make_params: ParamsFactory
    ) -> None:
        params = make_params(n=502, p=0.05, q=0.05)
        report = check_uncommon_neighbors(
            sample_csbm(params, 0), params, node_pair_sample_size=40, exact=True
        )
        assert report.observations == 40


class TestSumExp:
    def test_zero_logits_count_neighbours(self, star_sample: GraphSample) -> None:
        sums = class_exp_sums(star_sample, uniform_spec())
        same, other = class_neighbor_counts(star_sample)
        own = star_sample.labels
        expected_class0 = np.where(own == 0, same, other)
        expected_class1 = np.where(own == 1, same, other)
        assert np.array_equal(sums[:, 0], expected_class0)
        assert np.array_equal(sums[:, 1], expected_class1)

    def test_single_neighbour(self, make_sample: SampleFactory) -> None:
        sample = make_sample(labels=[0, 1], edges=[(0, 1)], edge_features=[[0.7]])
        spec = AttentionSpec(kind=AttentionKind.CONSTRUCTED_CLEAN, s=(1.0,))
        sums = class_exp_sums(sample, spec)
        assert sums[0].tolist() == [0.0, pytest.approx(math.exp(0.7))]
        assert sums[1].tolist() == [pytest.approx(math.exp(0.7)), 0.0]

    def test_uniform_on_sample_passes(self, make_params: ParamsFactory) -> None:
        params = make_params()
        report = check_sum_exp_bounds(sample_csbm(params, 7), params, uniform_spec())
        assert report.passed
        assert not report.degenerate
        assert report.observed_constants["c_hi_observed"] < 1.0

    def test_empty_model_is_degenerate(self, make_params: ParamsFactory) -> None:
        params = make_params(n=20, p=0.0, q=0.0)
        report = check_sum_exp_bounds(sample_csbm(params, 0), params, uniform_spec())
        assert report.degenerate
        assert not report.passed


class TestGammaRatio:
    def test_uniform_masses(self, make_sample: SampleFactory) -> None:
        sample = make_sample(
            labels=[0, 0, 0, 0, 1],
            edges=[(0, 1), (0, 2), (0, 3), (0, 4)],
        )
        same, other = gamma_class_masses(
            sample, attention_coefficients(sample, uniform_spec())
        )
        assert same[0] / other[0] == pytest.approx(3.0)

    def test_equal_probabilities_are_degenerate(
        self, make_params: ParamsFactory
    ) -> None:
        params = make_params(n=200, p=0.3, q=0.3)
        sample = sample_csbm(params, 8)
        gamma = attention_coefficients(sample, uniform_spec())
        report = check_gamma_ratio_bounds(sample, gamma, params)
        assert report.degenerate
        assert not report.passed
        assert abs(report.quantiles["q50"]) < 0.1

    def test_uniform_attention_passes(self, make_params: ParamsFactory) -> None:
        params = make_params(p=0.4, q=0.1)
        sample = sample_csbm(params, 9)
        gamma = attention_coefficients(sample, uniform_spec())
        report = check_gamma_ratio_bounds(sample, gamma, params)
        assert report.passed
        assert report.violation_count == 0
        assert report.quantiles["q50"] == pytest.approx(1.0, abs=0.2)

    def test_mass_on_the_other_class_is_flagged(
        self, make_sample: SampleFactory, make_params: ParamsFactory
    ) -> None:
        # Node 0 has one same-class and three other-class neighbours; the leaves
        # 2, 3 and 4 only see node 0. Node 1 sits at (p + q) / (p - q) = 5 / 3.
        sample = make_sample(
            labels=[0, 0, 1, 1, 1],
            edges=[(0, 1), (0, 2), (0, 3), (0, 4)],
        )
        params = make_params(n=5, p=0.4, q=0.1)
        gamma = attention_coefficients(sample, uniform_spec())
        report = check_gamma_ratio_bounds(sample, gamma, params)
        assert report.observed_constants["wrong_side"] == 4
        assert report.observed_constants["above_band"] == 0
        assert report.violation_count == 4
        assert report.observed_constants["c_observed"] == pytest.approx(5 / 3)
        assert not report.passed

    def test_clean_attention_leaves_the_band(
        self, make_params: ParamsFactory
    ) -> None:
        params = make_params(n=200, p=0.4, q=0.33, nu_norm=5.0)
        sample = sample_csbm(params, 10)
        gamma = attention_coefficients(sample, build_clean_spec(params, 2.0))
        report = check_gamma_ratio_bounds(sample, gamma, params)
        assert not report.passed


class TestSumSqGamma:
    def test_uniform_sample_passes(self, make_params: ParamsFactory) -> None:
        params = make_params()
        sample = sample_csbm(params, 11)
        report = check_sum_sq_gamma(
            sample, attention_coefficients(sample, uniform_spec()), params
        )
        assert report.center == pytest.approx(2 / (400 * 0.73))
        assert report.passed
        assert report.max_deviation == pytest.approx(1.0, abs=0.2)

    def test_empty_model_is_degenerate(self, make_params: ParamsFactory) -> None:
        params = make_params(n=20, p=0.0, q=0.0)
        sample = sample_csbm(params, 0)
        report = check_sum_sq_gamma(
            sample, attention_coefficients(sample, uniform_spec()), params
        )
        assert report.degenerate
        assert not report.passed


class TestGammaUniformity:
    def test_uniform_passes(self, make_params: ParamsFactory) -> None:
        params = make_params(n=100)
        sample = sample_csbm(params, 12)
        report = check_gamma_uniformity(
            sample, attention_coefficients(sample, uniform_spec())
        )
        assert report.passed
        assert report.violation_count == 0

    def test_concentrated_attention_fails(self, make_params: ParamsFactory) -> None:
        params = make_params(n=100, p=0.4, q=0.1, nu_norm=5.0)
        sample = sample_csbm(params, 13)
        gamma = attention_coefficients(sample, build_clean_spec(params, 2.0))
        report = check_gamma_uniformity(sample, gamma)
        assert not report.passed
        assert report.violation_fraction > 0.5
