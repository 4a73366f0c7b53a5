"""Sampling graphs from a rank model and a probability profile.

Each node pair is an independent Bernoulli trial: the pair at rank r becomes an
edge with probability P(r). The uniform draw for a pair is keyed on
``(sample_seed, u, v)``, so a graph does not depend on evaluation order and
batch runs can be spread over workers without changing the result.
"""

from __future__ import annotations

import logging
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field, replace
from functools import cached_property
from typing import TYPE_CHECKING, Any

import networkx as nx
import numpy as np
import numpy.typing as npt
from scipy import sparse

from rankgraph.errors import ConfigurationError, InvalidPairError, ValidationError
from rankgraph.rank import pair_arrays
from rankgraph.streams import check_seed, derive_seeds, pair_uniforms

if TYPE_CHECKING:
    from collections.abc import Iterable, Mapping

    from rankgraph.profile import ProbabilityProfile
    from rankgraph.rank import RankModel

logger = logging.getLogger(__name__)


@dataclass(frozen=True, eq=False)
class Graph:
    """A simple undirected graph on nodes ``0 .. n-1``.

    ``edges`` is an ``(E, 2)`` array of ``u < v`` rows in lexicographic order.
    """

    n: int
    edges: npt.NDArray[np.int64]
    metadata: Mapping[str, Any] = field(default_factory=dict)

    def __post_init__(self) -> None:
        self.edges.setflags(write=False)

    @classmethod
    def from_edges(
        cls,
        n: int,
        edges: Iterable[tuple[int, int]],
        metadata: Mapping[str, Any] | None = None,
    ) -> Graph:
        """Build a graph from ``(u, v)`` pairs in any order and orientation."""
        seen: set[tuple[int, int]] = set()
        for a, b in edges:
            u, v = (int(a), int(b)) if a < b else (int(b), int(a))
            if u == v or u < 0 or v >= n:
                raise InvalidPairError(int(a), int(b), n)
            seen.add((u, v))
        rows = np.array(sorted(seen), dtype=np.int64).reshape(-1, 2)
        return cls(n=n, edges=rows, metadata=dict(metadata or {}))

    @property
    def edge_count(self) -> int:
        return int(self.edges.shape[0])

    @cached_property
    def edge_set(self) -> frozenset[tuple[int, int]]:
        return frozenset((int(u), int(v)) for u, v in self.edges)

    @cached_property
    def adjacency(self) -> sparse.csr_array:
        """Symmetric 0/1 adjacency matrix in CSR form."""
        u = self.edges[:, 0]
        v = self.edges[:, 1]
        rows = np.concatenate([u, v])
        cols = np.concatenate([v, u])
        data = np.ones(rows.size, dtype=np.int64)
        return sparse.csr_array((data, (rows, cols)), shape=(self.n, self.n))

    @cached_property
    def degrees(self) -> npt.NDArray[np.int64]:
        return np.bincount(self.edges.reshape(-1), minlength=self.n).astype(np.int64)

    def neighbors(self, node: int) -> list[int]:
        adjacency = self.adjacency
        start, stop = adjacency.indptr[node], adjacency.indptr[node + 1]
        return sorted(int(x) for x in adjacency.indices[start:stop])

    def to_networkx(self) -> nx.Graph:
        """Convert to a ``networkx.Graph`` holding every node, isolated ones included."""
        graph = nx.Graph(**dict(self.metadata))
        graph.add_nodes_from(range(self.n))
        graph.add_edges_from((int(u), int(v)) for u, v in self.edges)
        return graph


@dataclass(frozen=True, eq=False)
class GeneratorSpec:
    """A random graph model: a structure, a profile and a sampling seed."""

    model: RankModel
    profile: ProbabilityProfile
    sample_seed: int = 0

    def __post_init__(self) -> None:
        if self.model.pair_count != self.profile.pair_count:
            raise ConfigurationError(
                f"Rank model has L={self.model.pair_count} pairs but profile has "
                f"L={self.profile.pair_count}"
            )
        check_seed(self.sample_seed)

    def pair_probabilities(self) -> npt.NDArray[np.float64]:
        """Edge probability of every pair, in lexicographic pair order."""
        return self.profile.probabilities[self.model.ranks - 1]

    def generate(self) -> Graph:
        return generate(self)


def generate(spec: GeneratorSpec) -> Graph:
    """Draw one graph: pair (u, v) is an edge when its keyed uniform is below P."""
    model = spec.model
    if model.pair_count != spec.profile.pair_count:
        raise ConfigurationError("Rank model and profile disagree on the number of pairs")
    u, v = pair_arrays(model.n)
    draws = pair_uniforms(spec.sample_seed, u, v, purpose="sample")
    include = draws < spec.pair_probabilities()
    edges = np.column_stack([u[include], v[include]]).astype(np.int64)

    logger.debug(
        "Sampled %d edges for %s (n=%d, epsilon=%g, seed=%d)",
        edges.shape[0],
        model.name,
        model.n,
        spec.profile.epsilon,
        spec.sample_seed,
    )
    return Graph(
        n=model.n,
        edges=edges,
        metadata={
            "structure": model.name,
            "n": model.n,
            "m": spec.profile.m,
            "epsilon": spec.profile.epsilon,
            "tie_seed": model.tie_seed,
            "sample_seed": spec.sample_seed,
        },
    )


def generate_batch(
    spec: GeneratorSpec,
    count: int,
    seed_stream: int,
    *,
    workers: int = 1,
) -> list[Graph]:
    """Draw ``count`` independent graphs with run seeds derived from ``seed_stream``.

    The result is the same for any ``workers`` value.
    """
    if count < 1:
        raise ValidationError(f"count must be at least 1, got {count}")
    specs = [replace(spec, sample_seed=seed) for seed in derive_seeds(seed_stream, count)]
    if workers <= 1:
        return [generate(s) for s in specs]
    with ThreadPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(generate, specs))
