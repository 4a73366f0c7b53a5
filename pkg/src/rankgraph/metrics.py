"""Small-world scores of generated graphs and epsilon sweeps over the zoo.

All graph measures work on the sparse adjacency matrix: triangle counts come
from ``A @ A`` masked by ``A``, components and breadth-first distances from
``scipy.sparse.csgraph``.
"""

from __future__ import annotations

import logging
import math
from collections.abc import Callable, Iterable, Sequence
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import TYPE_CHECKING

import numpy as np
import numpy.typing as npt
from scipy import stats
from scipy.sparse import csgraph

from rankgraph.errors import InfeasibleDensityError, ValidationError
from rankgraph.profile import ProbabilityProfile, probability_vector
from rankgraph.rank import pair_count
from rankgraph.sampler import GeneratorSpec, generate_batch
from rankgraph.zoo import ZooSpec, available_structures, build_structure, normalize_structure_name

if TYPE_CHECKING:
    from rankgraph.sampler import Graph

logger = logging.getLogger(__name__)

DEFAULT_EPSILONS: tuple[float, ...] = (
    0.0,
    1e-3,
    10**-2.5,
    1e-2,
    10**-1.5,
    1e-1,
    10**-0.5,
    1.0,
)
DEFAULT_RUNS = 5
GCC_THRESHOLD = 0.9
"""delta-hat is 0 unless the giant component holds more than this share of nodes."""


def local_clustering(g: Graph) -> npt.NDArray[np.float64]:
    """Clustering coefficient of every node; nodes of degree < 2 get 0."""
    adjacency = g.adjacency
    triangles = np.asarray((adjacency @ adjacency).multiply(adjacency).sum(axis=1)).ravel() / 2
    degrees = g.degrees.astype(np.float64)
    possible = degrees * (degrees - 1) / 2
    result = np.zeros(g.n, dtype=np.float64)
    mask = possible > 0
    result[mask] = triangles[mask] / possible[mask]
    return result


def clustering_coefficient(g: Graph) -> float:
    """Average local clustering over all nodes."""
    if g.n == 0:
        return 0.0
    return float(local_clustering(g).mean())


def largest_component(g: Graph) -> npt.NDArray[np.int64]:
    """Sorted node ids of the largest connected component.

    Among components of equal size the one holding the smallest node id wins.
    """
    _, labels = csgraph.connected_components(g.adjacency, directed=False)
    sizes = np.bincount(labels)
    largest = sizes == sizes.max()
    # first node of each label, in node order
    ids, first = np.unique(labels, return_index=True)
    candidates = ids[largest[ids]]
    label = candidates[np.argmin(first[largest[ids]])]
    return np.flatnonzero(labels == label).astype(np.int64)


def mean_distance(g: Graph, nodes: npt.NDArray[np.int64] | None = None) -> float:
    """Average hop distance over unordered pairs of ``nodes``.

    ``nodes`` defaults to the largest component and must be connected. A
    single node has mean distance 0.
    """
    if nodes is None:
        nodes = largest_component(g)
    if nodes.size < 2:
        return 0.0
    sub = g.adjacency[nodes][:, nodes]
    distances = csgraph.shortest_path(sub, directed=False, unweighted=True)
    upper = distances[np.triu_indices(nodes.size, k=1)]
    if not np.all(np.isfinite(upper)):
        raise ValidationError("mean_distance needs a connected node set")
    return float(upper.mean())


def delta_hat_from(gcc_fraction: float, distance: float) -> float:
    if gcc_fraction <= GCC_THRESHOLD:
        return 0.0
    return 1.0 / (1.0 + max(0.0, distance - 2.0))


def delta_hat(g: Graph) -> float:
    """Scaled short-path score: 1 when the giant component is within two hops."""
    gcc = largest_component(g)
    return delta_hat_from(gcc.size / g.n, mean_distance(g, gcc))


def degree_clustering_correlation(g: Graph) -> float:
    """Spearman rho between degree and local clustering over nodes of degree >= 2.

    NaN when fewer than three such nodes exist or either side is constant.
    """
    degrees = g.degrees
    mask = degrees >= 2
    clustering = local_clustering(g)[mask]
    degrees = degrees[mask]
    if degrees.size < 3 or np.ptp(degrees) == 0 or np.ptp(clustering) == 0:
        return math.nan
    rho = stats.spearmanr(degrees, clustering).statistic
    return float(rho)


@dataclass(frozen=True)
class GraphScores:
    """Scores of one generated graph."""

    cc: float
    gcc_fraction: float
    mean_distance: float
    delta_hat: float


def score_graph(g: Graph) -> GraphScores:
    gcc = largest_component(g)
    fraction = gcc.size / g.n
    distance = mean_distance(g, gcc)
    return GraphScores(
        cc=clustering_coefficient(g),
        gcc_fraction=fraction,
        mean_distance=distance,
        delta_hat=delta_hat_from(fraction, distance),
    )


@dataclass(frozen=True)
class MetricRow:
    """Scores at one epsilon, averaged over ``runs`` graphs."""

    epsilon: float
    cc: float
    delta_hat: float
    gcc_fraction: float
    mean_distance: float
    runs: int
    cc_std: float = 0.0
    delta_hat_std: float = 0.0

    @classmethod
    def from_scores(cls, epsilon: float, scores: Sequence[GraphScores]) -> MetricRow:
        cc = np.array([s.cc for s in scores])
        dh = np.array([s.delta_hat for s in scores])
        return cls(
            epsilon=epsilon,
            cc=float(cc.mean()),
            delta_hat=float(dh.mean()),
            gcc_fraction=float(np.mean([s.gcc_fraction for s in scores])),
            mean_distance=float(np.mean([s.mean_distance for s in scores])),
            runs=len(scores),
            cc_std=float(cc.std()),
            delta_hat_std=float(dh.std()),
        )


@dataclass(frozen=True)
class ProfileResult:
    """A small-world profile: one row per epsilon, epsilon increasing."""

    structure: str
    n: int
    m: float
    rows: tuple[MetricRow, ...] = field(default=())

    def __post_init__(self) -> None:
        epsilons = [row.epsilon for row in self.rows]
        if any(b <= a for a, b in zip(epsilons, epsilons[1:], strict=False)):
            raise ValidationError("Profile rows must have strictly increasing epsilon")

    @property
    def epsilons(self) -> list[float]:
        return [row.epsilon for row in self.rows]


class ProfileCache:
    """Memoizes probability profiles by ``(L, m, epsilon)``.

    Profiles do not depend on the structure, so a zoo sweep builds each once.
    """

    def __init__(self) -> None:
        self._profiles: dict[tuple[int, float, float], ProbabilityProfile] = {}

    def get(self, pair_count: int, m: float, epsilon: float) -> ProbabilityProfile:
        key = (pair_count, float(m), float(epsilon))
        if key not in self._profiles:
            self._profiles[key] = probability_vector(pair_count, m, epsilon)
        return self._profiles[key]

    def __len__(self) -> int:
        return len(self._profiles)


def check_epsilons(epsilons: Iterable[float]) -> list[float]:
    """Sorted, de-duplicated epsilon grid; every value must lie in [0, 1]."""
    values = sorted({float(e) for e in epsilons})
    if not values:
        raise ValidationError("Epsilon grid is empty")
    for e in values:
        if not 0.0 <= e <= 1.0:
            raise ValidationError(f"epsilon must lie in [0, 1], got {e}")
    return values


RowCallback = Callable[[str, MetricRow], None]


def smallworld_profile(
    structure: ZooSpec | str,
    n: int,
    m: float,
    epsilons: Iterable[float] = DEFAULT_EPSILONS,
    runs: int = DEFAULT_RUNS,
    *,
    tie_seed: int = 0,
    sample_seed: int = 0,
    workers: int = 1,
    cache: ProfileCache | None = None,
    on_row: RowCallback | None = None,
) -> ProfileResult:
    """Sweep epsilon for one structure and average the scores of ``runs`` graphs.

    Run seeds are derived from ``sample_seed`` and reused at every epsilon, so
    neighbouring rows are drawn from the same uniforms.
    """
    if runs < 1:
        raise ValidationError(f"runs must be at least 1, got {runs}")
    grid = check_epsilons(epsilons)
    spec = ZooSpec(structure) if isinstance(structure, str) else structure
    model = build_structure(spec, n, m, tie_seed)
    cache = cache if cache is not None else ProfileCache()

    rows: list[MetricRow] = []
    for epsilon in grid:
        profile = cache.get(model.pair_count, m, epsilon)
        graphs = generate_batch(GeneratorSpec(model, profile), runs, sample_seed, workers=workers)
        if workers > 1:
            with ThreadPoolExecutor(max_workers=workers) as pool:
                scores = list(pool.map(score_graph, graphs))
        else:
            scores = [score_graph(g) for g in graphs]
        row = MetricRow.from_scores(epsilon, scores)
        logger.info(
            "%s epsilon=%g cc=%.4f delta_hat=%.4f gcc=%.3f",
            model.name,
            epsilon,
            row.cc,
            row.delta_hat,
            row.gcc_fraction,
        )
        if on_row is not None:
            on_row(model.name, row)
        rows.append(row)
    return ProfileResult(structure=model.name, n=n, m=m, rows=tuple(rows))


def zoo_profiles(
    n: int,
    m: float,
    structures: Sequence[str] | None = None,
    epsilons: Iterable[float] = DEFAULT_EPSILONS,
    runs: int = DEFAULT_RUNS,
    *,
    tie_seed: int = 0,
    sample_seed: int = 0,
    workers: int = 1,
    on_row: RowCallback | None = None,
) -> list[ProfileResult]:
    """Profiles of several zoo structures at the same n and m (the whole zoo by default)."""
    if not 0 <= m <= pair_count(n):
        raise InfeasibleDensityError(m, pair_count(n))
    names = [normalize_structure_name(s) for s in structures] if structures else available_structures()
    grid = check_epsilons(epsilons)
    cache = ProfileCache()
    return [
        smallworld_profile(
            name,
            n,
            m,
            grid,
            runs,
            tie_seed=tie_seed,
            sample_seed=sample_seed,
            workers=workers,
            cache=cache,
            on_row=on_row,
        )
        for name in names
    ]
