"""Rank models: total orders over the node pairs of an n-node graph.

A structure is described by a cost per undirected pair. Sorting pairs by cost
gives their rank, 1 for the pair most likely to be connected. Equal costs are
ordered by a 64-bit key drawn per pair from a stream keyed on the tie seed, so
ties are broken uniformly at random but reproducibly, and never reorder pairs
whose costs differ.

Pairs are addressed three ways:

- ``NodePair(u, v)`` with ``0 <= u < v < n``;
- the lexicographic pair index ``0 .. L-1`` (the order of ``numpy.triu_indices``
  and of ``scipy.spatial.distance.pdist``), used for cost vectors;
- the rank ``1 .. L``.
"""

from __future__ import annotations

import logging
import math
from collections.abc import Callable, Iterator
from dataclasses import dataclass, field
from typing import TYPE_CHECKING, Any

import numpy as np
import numpy.typing as npt

from rankgraph.errors import InvalidPairError, NonFiniteCostError, ValidationError
from rankgraph.streams import check_seed, pair_keys

if TYPE_CHECKING:
    from rankgraph.sampler import GeneratorSpec, Graph

logger = logging.getLogger(__name__)

CostFunction = Callable[[int, int, int], float]
"""Cost of the pair ``(u, v)`` in a graph of ``n`` nodes; lower ranks first."""


@dataclass(frozen=True, order=True)
class NodePair:
    """An undirected node pair, stored with ``u < v``."""

    u: int
    v: int

    def __post_init__(self) -> None:
        if self.u < 0 or self.u >= self.v:
            raise InvalidPairError(self.u, self.v)

    def __iter__(self) -> Iterator[int]:
        yield self.u
        yield self.v


def pair_count(n: int) -> int:
    """Number of unordered node pairs, L = n(n-1)/2."""
    return n * (n - 1) // 2


def pair_arrays(n: int) -> tuple[npt.NDArray[np.int64], npt.NDArray[np.int64]]:
    """Endpoints of every pair in lexicographic order."""
    u, v = np.triu_indices(n, k=1)
    return u.astype(np.int64), v.astype(np.int64)


def pair_index(n: int, u: npt.ArrayLike, v: npt.ArrayLike) -> npt.NDArray[np.int64]:
    """Lexicographic index of ``(u, v)``, the inverse of :func:`pair_arrays`."""
    u_arr = np.asarray(u, dtype=np.int64)
    v_arr = np.asarray(v, dtype=np.int64)
    return u_arr * n - u_arr * (u_arr + 1) // 2 + (v_arr - u_arr - 1)


def _check_node_count(n: int) -> None:
    if n < 2:
        raise ValidationError(f"A rank model needs at least 2 nodes, got n={n}")


def _readonly(array: npt.NDArray[Any]) -> npt.NDArray[Any]:
    array.setflags(write=False)
    return array


@dataclass(frozen=True, eq=False)
class RankModel:
    """A total order over all node pairs of an ``n``-node graph.

    ``order[r - 1]`` is the lexicographic index of the pair of rank ``r``;
    ``costs`` holds the cost of every pair in lexicographic order.
    """

    n: int
    order: npt.NDArray[np.int64]
    costs: npt.NDArray[np.float64]
    tie_seed: int
    ascending: bool = True
    name: str = "custom"
    node_order: npt.NDArray[np.int64] | None = None
    """Optional display order of nodes (by latent position or block)."""

    ranks: npt.NDArray[np.int64] = field(init=False, repr=False)
    """``ranks[i]`` is the 1-based rank of the pair with lexicographic index ``i``."""

    def __post_init__(self) -> None:
        ranks = np.empty(self.order.size, dtype=np.int64)
        ranks[self.order] = np.arange(1, self.order.size + 1, dtype=np.int64)
        object.__setattr__(self, "ranks", _readonly(ranks))
        _readonly(self.order)
        _readonly(self.costs)
        if self.node_order is not None:
            _readonly(self.node_order)

    @property
    def pair_count(self) -> int:
        """L, the number of ranked pairs."""
        return int(self.order.size)

    def pair(self, rank: int) -> NodePair:
        """The pair holding ``rank`` (1-based)."""
        if not 1 <= rank <= self.pair_count:
            raise ValidationError(f"Rank {rank} outside [1, {self.pair_count}]")
        u, v = pair_arrays_at(self.n, self.order[rank - 1 : rank])
        return NodePair(int(u[0]), int(v[0]))

    def ranked_pairs(self) -> tuple[npt.NDArray[np.int64], npt.NDArray[np.int64]]:
        """Endpoints ``(u, v)`` of every pair, sorted by rank."""
        return pair_arrays_at(self.n, self.order)

    def rank_of(self, pair: NodePair | tuple[int, int]) -> int:
        return rank_of(self, pair)

    def rank_matrix(self, *, display_order: bool = False) -> npt.NDArray[np.int64]:
        return rank_matrix(self, display_order=display_order)

    def generator(self, epsilon: float, m: float, sample_seed: int = 0) -> GeneratorSpec:
        """Bind this structure to a probability profile, ready to sample."""
        from rankgraph.profile import probability_vector
        from rankgraph.sampler import GeneratorSpec

        profile = probability_vector(self.pair_count, m, epsilon)
        return GeneratorSpec(model=self, profile=profile, sample_seed=sample_seed)

    def generate_graph(self, epsilon: float, m: float, sample_seed: int = 0) -> Graph:
        """Draw one graph from this structure."""
        from rankgraph.sampler import generate

        return generate(self.generator(epsilon, m, sample_seed))


def pair_arrays_at(
    n: int, index: npt.NDArray[np.int64]
) -> tuple[npt.NDArray[np.int64], npt.NDArray[np.int64]]:
    """Endpoints of the pairs with the given lexicographic indices."""
    u_all, v_all = pair_arrays(n)
    return u_all[index], v_all[index]


def rank_from_costs(
    n: int,
    costs: npt.ArrayLike,
    *,
    ascending: bool = True,
    tie_seed: int = 0,
    name: str = "custom",
    node_order: npt.ArrayLike | None = None,
) -> RankModel:
    """Build a rank model from a condensed cost vector in lexicographic order."""
    _check_node_count(n)
    tie_seed = check_seed(tie_seed)
    cost_vector = np.array(costs, dtype=np.float64).reshape(-1)
    expected = pair_count(n)
    if cost_vector.size != expected:
        raise ValidationError(
            f"Expected {expected} pair costs for n={n}, got {cost_vector.size}"
        )

    u, v = pair_arrays(n)
    bad = np.flatnonzero(~np.isfinite(cost_vector))
    if bad.size:
        i = int(bad[0])
        raise NonFiniteCostError(int(u[i]), int(v[i]), float(cost_vector[i]))

    primary = cost_vector if ascending else -cost_vector
    keys = pair_keys(tie_seed, u, v, purpose="tie")
    order = np.lexsort((keys, primary)).astype(np.int64)

    nodes = None
    if node_order is not None:
        nodes = np.array(node_order, dtype=np.int64).reshape(-1)
        if sorted(nodes.tolist()) != list(range(n)):
            raise ValidationError(f"node_order must be a permutation of range({n})")

    logger.debug("Ranked %d pairs for %s (n=%d, tie_seed=%d)", expected, name, n, tie_seed)
    return RankModel(
        n=n,
        order=order,
        costs=cost_vector,
        tie_seed=tie_seed,
        ascending=ascending,
        name=name,
        node_order=nodes,
    )


def build_rank_model(
    n: int,
    cost: CostFunction,
    *,
    ascending: bool = True,
    tie_seed: int = 0,
    name: str = "custom",
) -> RankModel:
    """Evaluate ``cost(u, v, n)`` on every pair and rank the pairs.

    Example:
        >>> model = build_rank_model(5, lambda u, v, _n: u + v)
        >>> model.pair(1)
        NodePair(u=0, v=1)
    """
    _check_node_count(n)
    values = np.empty(pair_count(n), dtype=np.float64)
    i = 0
    for u in range(n - 1):
        for v in range(u + 1, n):
            value = float(cost(u, v, n))
            if not math.isfinite(value):
                raise NonFiniteCostError(u, v, value)
            values[i] = value
            i += 1
    return rank_from_costs(n, values, ascending=ascending, tie_seed=tie_seed, name=name)


def rank_of(model: RankModel, pair: NodePair | tuple[int, int]) -> int:
    """The 1-based rank of ``pair`` in ``model``."""
    u, v = (pair.u, pair.v) if isinstance(pair, NodePair) else pair
    if u < 0 or u >= v or v >= model.n:
        raise InvalidPairError(u, v, model.n)
    return int(model.ranks[int(pair_index(model.n, u, v))])


def rank_matrix(model: RankModel, *, display_order: bool = False) -> npt.NDArray[np.int64]:
    """Symmetric ``n x n`` matrix of ranks with 0 on the diagonal.

    With ``display_order`` the rows and columns follow ``model.node_order``
    when the model has one.
    """
    n = model.n
    matrix = np.zeros((n, n), dtype=np.int64)
    u, v = pair_arrays(n)
    matrix[u, v] = model.ranks
    matrix[v, u] = model.ranks
    if display_order and model.node_order is not None:
        matrix = matrix[np.ix_(model.node_order, model.node_order)]
    return matrix
