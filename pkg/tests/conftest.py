"""Shared fixtures and brute-force oracles for rankgraph tests."""

from __future__ import annotations

import itertools
import math
from pathlib import Path
from typing import TYPE_CHECKING

import numpy as np
import pytest

from rankgraph.sampler import Graph

if TYPE_CHECKING:
    from collections.abc import Callable, Iterable


def make_graph(n: int, edges: Iterable[tuple[int, int]]) -> Graph:
    """Build a Graph from an explicit edge list."""
    return Graph.from_edges(n, edges)


def random_edges(n: int, p: float, seed: int) -> list[tuple[int, int]]:
    """Erdos-Renyi edge list drawn with numpy's default generator."""
    rng = np.random.default_rng(seed)
    return [(u, v) for u, v in itertools.combinations(range(n), 2) if rng.random() < p]


def neighbour_sets(n: int, edges: Iterable[tuple[int, int]]) -> list[set[int]]:
    adjacency: list[set[int]] = [set() for _ in range(n)]
    for u, v in edges:
        adjacency[u].add(v)
        adjacency[v].add(u)
    return adjacency


def brute_force_clustering(n: int, edges: Iterable[tuple[int, int]]) -> float:
    """Average local clustering by enumerating every neighbour pair."""
    adjacency = neighbour_sets(n, edges)
    total = 0.0
    for node in range(n):
        neighbours = sorted(adjacency[node])
        k = len(neighbours)
        if k < 2:
            continue
        closed = sum(1 for a, b in itertools.combinations(neighbours, 2) if b in adjacency[a])
        total += closed / (k * (k - 1) / 2)
    return total / n


def floyd_warshall(n: int, edges: Iterable[tuple[int, int]]) -> list[list[float]]:
    """All-pairs hop distances; math.inf between components."""
    dist = [[0.0 if i == j else math.inf for j in range(n)] for i in range(n)]
    for u, v in edges:
        dist[u][v] = dist[v][u] = 1.0
    for k in range(n):
        for i in range(n):
            for j in range(n):
                if dist[i][k] + dist[k][j] < dist[i][j]:
                    dist[i][j] = dist[i][k] + dist[k][j]
    return dist


def brute_force_mean_distance(n: int, edges: Iterable[tuple[int, int]], nodes: Iterable[int]) -> float:
    dist = floyd_warshall(n, edges)
    pairs = list(itertools.combinations(sorted(nodes), 2))
    if not pairs:
        return 0.0
    return sum(dist[a][b] for a, b in pairs) / len(pairs)


def write_csv(path: Path, rows: Iterable[Iterable[object]], header: str | None = None) -> Path:
    lines = [header] if header else []
    lines.extend(",".join(str(cell) for cell in row) for row in rows)
    path.write_text("\n".join(lines) + "\n")
    return path


@pytest.fixture
def graph_factory() -> Callable[[int, Iterable[tuple[int, int]]], Graph]:
    """Fixture that returns the make_graph function."""
    return make_graph


@pytest.fixture
def triangle() -> Graph:
    return make_graph(3, [(0, 1), (0, 2), (1, 2)])


@pytest.fixture
def star4() -> Graph:
    """Center 0 and three leaves."""
    return make_graph(4, [(0, 1), (0, 2), (0, 3)])


@pytest.fixture
def seed_env(monkeypatch: pytest.MonkeyPatch) -> pytest.MonkeyPatch:
    """Clear RANKGRAPH_SEED so defaults are predictable."""
    monkeypatch.delenv("RANKGRAPH_SEED", raising=False)
    return monkeypatch
