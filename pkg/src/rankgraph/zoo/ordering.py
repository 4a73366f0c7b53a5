"""Index-driven structures: nested, star, Watts-Strogatz ring and the ER baseline.

Formulas written for 1-based node indices are applied to 0-based ones; the
constant offset shifts every cost equally and leaves the order unchanged.
"""

from __future__ import annotations

from typing import TYPE_CHECKING, Literal

import numpy as np

from rankgraph.errors import ValidationError
from rankgraph.rank import pair_arrays, pair_count, rank_from_costs

if TYPE_CHECKING:
    from rankgraph.rank import RankModel


def erdos_renyi(n: int, seed: int = 0) -> RankModel:
    """No structure: every pair has the same cost, ties decide everything."""
    return rank_from_costs(n, np.zeros(pair_count(n)), tie_seed=seed, name="erdos_renyi")


def nested(n: int, seed: int = 0) -> RankModel:
    """Nestedness: cost(u, v) = u + v, low-index nodes connect first."""
    u, v = pair_arrays(n)
    return rank_from_costs(n, (u + v).astype(np.float64), tie_seed=seed, name="nested")


def star(n: int, seed: int = 0) -> RankModel:
    """Stars around low-index hubs: cost(u, v) = u * n + v, no ties."""
    u, v = pair_arrays(n)
    return rank_from_costs(n, (u * n + v).astype(np.float64), tie_seed=seed, name="star")


def watts_strogatz_rank(
    n: int,
    k: int = 10,
    seed: int = 0,
    *,
    variant: Literal["modular", "ring"] = "modular",
) -> RankModel:
    """Ring lattice of mean degree ``k``: near neighbours on the circle rank first.

    ``variant="modular"`` uses cost 0 when (v - u) mod (n - k/2) < k/2, taken
    literally; ``variant="ring"`` uses the standard lattice condition
    min(v - u, n - (v - u)) <= k/2.
    """
    if k % 2 or not 2 <= k < n:
        raise ValidationError(f"k must be even with 2 <= k < n, got k={k}, n={n}")
    half = k // 2
    u, v = pair_arrays(n)
    gap = v - u
    if variant == "modular":
        near = (gap % (n - half)) < half
    elif variant == "ring":
        near = np.minimum(gap, n - gap) <= half
    else:
        raise ValidationError(f"Unknown Watts-Strogatz variant {variant!r}")
    return rank_from_costs(n, np.where(near, 0.0, 1.0), tie_seed=seed, name="watts_strogatz")
