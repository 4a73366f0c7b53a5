"""Tests for graph sampling."""

from __future__ import annotations

import math

import networkx as nx
import numpy as np
import pytest

from rankgraph.errors import ConfigurationError, InvalidPairError, ValidationError
from rankgraph.profile import probability_vector
from rankgraph.rank import pair_count
from rankgraph.sampler import GeneratorSpec, Graph, generate, generate_batch
from rankgraph.zoo import erdos_renyi, nested, star


def _spec(model_n: int, m: float, epsilon: float, seed: int = 0) -> GeneratorSpec:
    model = nested(model_n, seed=1)
    return GeneratorSpec(model, probability_vector(model.pair_count, m, epsilon), seed)


class TestGraph:
    def test_from_edges_normalizes(self) -> None:
        graph = Graph.from_edges(4, [(2, 0), (0, 2), (3, 1)])
        assert graph.edges.tolist() == [[0, 2], [1, 3]]
        assert graph.edge_count == 2

    def test_rejects_loops_and_out_of_range(self) -> None:
        with pytest.raises(InvalidPairError):
            Graph.from_edges(3, [(1, 1)])
        with pytest.raises(InvalidPairError):
            Graph.from_edges(3, [(0, 3)])

    def test_degrees_and_neighbors(self, star4: Graph) -> None:
        assert star4.degrees.tolist() == [3, 1, 1, 1]
        assert star4.neighbors(0) == [1, 2, 3]
        assert star4.neighbors(2) == [0]

    def test_adjacency_symmetric(self, star4: Graph) -> None:
        dense = star4.adjacency.toarray()
        np.testing.assert_array_equal(dense, dense.T)
        assert dense.sum() == 6

    def test_to_networkx_keeps_isolated_nodes(self) -> None:
        graph = Graph.from_edges(5, [(0, 1)], {"structure": "test"})
        converted = graph.to_networkx()
        assert isinstance(converted, nx.Graph)
        assert converted.number_of_nodes() == 5
        assert converted.number_of_edges() == 1
        assert converted.graph["structure"] == "test"


class TestGeneratorSpec:
    def test_pair_count_mismatch(self) -> None:
        with pytest.raises(ConfigurationError, match="L=10"):
            GeneratorSpec(nested(5), probability_vector(6, 3, 0.5))

    def test_rank_model_shortcut(self) -> None:
        graph = star(6).generate_graph(0.0, 5)
        assert graph.edge_set == {(0, 1), (0, 2), (0, 3), (0, 4), (0, 5)}


class TestGenerate:
    def test_zero_epsilon_takes_lowest_ranks(self) -> None:
        spec = _spec(20, 30, 0.0)
        graph = generate(spec)
        assert graph.edge_count == 30
        expected = {tuple(spec.model.pair(r)) for r in range(1, 31)}
        assert graph.edge_set == expected

    def test_zero_epsilon_ignores_sample_seed(self) -> None:
        assert generate(_spec(20, 30, 0.0, seed=1)).edge_set == generate(_spec(20, 30, 0.0, seed=99)).edge_set

    def test_same_seed_same_graph(self) -> None:
        a = generate(_spec(40, 100, 0.3, seed=5))
        b = generate(_spec(40, 100, 0.3, seed=5))
        np.testing.assert_array_equal(a.edges, b.edges)

    def test_metadata(self) -> None:
        graph = generate(_spec(10, 5, 0.5, seed=3))
        assert graph.metadata["structure"] == "nested"
        assert graph.metadata["sample_seed"] == 3
        assert graph.metadata["epsilon"] == 0.5

    def test_uniform_edge_count_concentrates(self) -> None:
        n, m = 512, 128
        length = pair_count(n)
        model = erdos_renyi(n)
        spec = GeneratorSpec(model, probability_vector(length, m, 1.0))
        counts = [g.edge_count for g in generate_batch(spec, 1000, seed_stream=17)]
        p = m / length
        sigma = math.sqrt(length * p * (1 - p))
        assert abs(np.mean(counts) - m) < 3 * sigma

    def test_inclusion_rate_matches_probability(self) -> None:
        n, m = 6, 5
        model = nested(n, seed=2)
        profile = probability_vector(model.pair_count, m, 0.5)
        spec = GeneratorSpec(model, profile)
        draws = 10_000
        counts = np.zeros(model.pair_count)
        for graph in generate_batch(spec, draws, seed_stream=8):
            for u, v in graph.edges.tolist():
                counts[model.rank_of((u, v)) - 1] += 1
        rates = counts / draws
        p = profile.probabilities
        tolerance = 4 * np.sqrt(p * (1 - p) / draws) + 1e-12
        assert np.all(np.abs(rates - p) <= tolerance)


class TestGenerateBatch:
    def test_count_one_uses_derived_seed(self) -> None:
        spec = _spec(30, 60, 0.5)
        [graph] = generate_batch(spec, 1, seed_stream=4)
        again = generate(GeneratorSpec(spec.model, spec.profile, graph.metadata["sample_seed"]))
        np.testing.assert_array_equal(graph.edges, again.edges)

    def test_runs_differ(self) -> None:
        graphs = generate_batch(_spec(40, 150, 0.5), 2, seed_stream=0)
        a, b = graphs[0].edge_set, graphs[1].edge_set
        assert len(a & b) / len(a | b) < 1

    def test_workers_do_not_change_result(self) -> None:
        spec = _spec(40, 150, 0.4)
        sequential = generate_batch(spec, 6, seed_stream=3)
        threaded = generate_batch(spec, 6, seed_stream=3, workers=3)
        for a, b in zip(sequential, threaded, strict=True):
            np.testing.assert_array_equal(a.edges, b.edges)

    def test_count_must_be_positive(self) -> None:
        with pytest.raises(ValidationError):
            generate_batch(_spec(5, 3, 0.5), 0, seed_stream=0)

    def test_binomial_mean(self) -> None:
        model = nested(128, seed=0)
        profile = probability_vector(model.pair_count, 512, 0.5)
        counts = [g.edge_count for g in generate_batch(GeneratorSpec(model, profile), 200, seed_stream=1)]
        p = profile.probabilities
        sigma = math.sqrt(float(np.sum(p * (1 - p))))
        assert abs(np.mean(counts) - 512) < 3 * sigma
