"""Latent-space structures: spatial distance and soft core-periphery."""

from __future__ import annotations

from dataclasses import dataclass
from typing import TYPE_CHECKING, Literal

import numpy as np
import numpy.typing as npt
from scipy.spatial.distance import pdist

from rankgraph.errors import ValidationError
from rankgraph.rank import pair_arrays, pair_index, rank_from_costs
from rankgraph.streams import generator

if TYPE_CHECKING:
    from rankgraph.rank import CostFunction, RankModel

Metric = Literal["euclidean", "haversine"]
EARTH_RADIUS = 1.0


@dataclass(frozen=True, eq=False)
class Positions:
    """Node coordinates in a ``d``-dimensional latent space, one row per node."""

    coords: npt.NDArray[np.float64]
    source: Literal["uniform", "file"] = "uniform"

    def __post_init__(self) -> None:
        if self.coords.ndim != 2:
            raise ValidationError(f"Positions must be an n x d matrix, got shape {self.coords.shape}")
        if not np.all(np.isfinite(self.coords)):
            row = int(np.flatnonzero(~np.isfinite(self.coords).all(axis=1))[0])
            raise ValidationError(f"Position of node {row} is not finite")
        self.coords.setflags(write=False)

    @classmethod
    def uniform(cls, n: int, d: int, seed: int) -> Positions:
        """Uniform positions in the unit cube [0, 1]^d."""
        if d < 1:
            raise ValidationError(f"Dimension must be at least 1, got d={d}")
        coords = generator(seed, "positions").random((n, d))
        return cls(coords=coords, source="uniform")

    @property
    def n(self) -> int:
        return int(self.coords.shape[0])

    @property
    def d(self) -> int:
        return int(self.coords.shape[1])


def _resolve_positions(n: int, d: int, positions: Positions | None, seed: int) -> Positions:
    if positions is None:
        return Positions.uniform(n, d, seed)
    if positions.n != n:
        raise ValidationError(f"Positions have {positions.n} rows but n={n}")
    return positions


def haversine(
    lonlat_a: npt.NDArray[np.float64], lonlat_b: npt.NDArray[np.float64]
) -> npt.NDArray[np.float64]:
    """Great-circle distance between lon/lat rows (degrees), on the unit sphere."""
    lon1, lat1 = np.radians(lonlat_a[:, 0]), np.radians(lonlat_a[:, 1])
    lon2, lat2 = np.radians(lonlat_b[:, 0]), np.radians(lonlat_b[:, 1])
    a = np.sin((lat2 - lat1) / 2) ** 2 + np.cos(lat1) * np.cos(lat2) * np.sin((lon2 - lon1) / 2) ** 2
    return 2 * EARTH_RADIUS * np.arcsin(np.sqrt(np.clip(a, 0.0, 1.0)))


def pair_distances(coords: npt.NDArray[np.float64], metric: Metric = "euclidean") -> npt.NDArray[np.float64]:
    """Condensed distance vector over all pairs, in lexicographic pair order."""
    if metric == "euclidean":
        return pdist(coords, metric="euclidean")
    if metric == "haversine":
        if coords.shape[1] != 2:
            raise ValidationError("Haversine distance needs two columns: longitude, latitude")
        u, v = pair_arrays(coords.shape[0])
        return haversine(coords[u], coords[v])
    raise ValidationError(f"Unknown distance metric {metric!r}")


def center_distances(
    coords: npt.NDArray[np.float64],
    center: npt.ArrayLike | None = None,
    metric: Metric = "euclidean",
) -> npt.NDArray[np.float64]:
    """Distance of every node to ``center`` (the origin by default)."""
    origin = np.zeros(coords.shape[1]) if center is None else np.asarray(center, dtype=np.float64)
    if origin.shape != (coords.shape[1],):
        raise ValidationError(f"Center must have {coords.shape[1]} coordinates")
    if metric == "haversine":
        return haversine(coords, np.broadcast_to(origin, coords.shape))
    return np.linalg.norm(coords - origin, axis=1)


def latent_order(coords: npt.NDArray[np.float64], center: npt.ArrayLike | None = None) -> npt.NDArray[np.int64]:
    """Display order of nodes: by coordinate in 1-D, by distance to center otherwise."""
    key = coords[:, 0] if coords.shape[1] == 1 else center_distances(coords, center)
    return np.argsort(key, kind="stable").astype(np.int64)


def attribute_costs(
    positions: Positions,
    labels: npt.ArrayLike,
    penalty: float = 1.0,
    metric: Metric = "euclidean",
) -> npt.NDArray[np.float64]:
    """Condensed costs: distance plus ``penalty`` when the two labels differ."""
    label_array = np.asarray(labels)
    if label_array.shape != (positions.n,):
        raise ValidationError(f"Expected {positions.n} labels, got shape {label_array.shape}")
    u, v = pair_arrays(positions.n)
    differ = label_array[u] != label_array[v]
    return pair_distances(positions.coords, metric) + penalty * differ


def attribute_cost(
    positions: Positions,
    labels: npt.ArrayLike,
    penalty: float = 1.0,
    metric: Metric = "euclidean",
) -> CostFunction:
    """Attribute-driven cost, e.g. airports: same-country close pairs first."""
    costs = attribute_costs(positions, labels, penalty, metric)
    n = positions.n

    def cost(u: int, v: int, _n: int) -> float:
        return float(costs[int(pair_index(n, u, v))])

    return cost


def spatial(
    n: int,
    d: int = 1,
    positions: Positions | None = None,
    seed: int = 0,
    *,
    metric: Metric = "euclidean",
) -> RankModel:
    """Closer nodes rank first: cost(u, v) = distance(W_u, W_v)."""
    positions = _resolve_positions(n, d, positions, seed)
    costs = pair_distances(positions.coords, metric)
    return rank_from_costs(
        n,
        costs,
        tie_seed=seed,
        name="spatial",
        node_order=latent_order(positions.coords),
    )


def core_periphery(
    n: int,
    d: int = 1,
    positions: Positions | None = None,
    seed: int = 0,
    *,
    center: npt.ArrayLike | None = None,
    metric: Metric = "euclidean",
) -> RankModel:
    """Soft core: cost(u, v) = d(W_u, W_v) * d(W_u, c) * d(W_v, c).

    Pairs near the center ``c`` (the origin unless given) rank first; two
    peripheral nodes rank early only when they are very close to each other.
    """
    positions = _resolve_positions(n, d, positions, seed)
    radius = center_distances(positions.coords, center, metric)
    u, v = pair_arrays(n)
    costs = pair_distances(positions.coords, metric) * radius[u] * radius[v]
    return rank_from_costs(
        n,
        costs,
        tie_seed=seed,
        name="core_periphery",
        node_order=np.argsort(radius, kind="stable").astype(np.int64),
    )
