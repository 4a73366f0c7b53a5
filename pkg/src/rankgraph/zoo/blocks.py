"""Block structures: assortative, overlapping and disconnected cliques."""

from __future__ import annotations

import logging
import math
from collections.abc import Sequence
from dataclasses import dataclass
from typing import TYPE_CHECKING

import numpy as np
import numpy.typing as npt

from rankgraph.errors import InfeasibleDensityError, ValidationError
from rankgraph.rank import pair_arrays, pair_count, rank_from_costs

if TYPE_CHECKING:
    from rankgraph.rank import RankModel

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class BlockAffiliation:
    """The blocks each node belongs to; one set per node, never empty."""

    memberships: tuple[frozenset[int], ...]

    def __post_init__(self) -> None:
        for node, blocks in enumerate(self.memberships):
            if not blocks:
                raise ValidationError(f"Node {node} is not affiliated with any block")

    @classmethod
    def from_labels(cls, labels: Sequence[int] | npt.NDArray[np.int64]) -> BlockAffiliation:
        """Single membership: node ``i`` belongs to block ``labels[i]``."""
        return cls(tuple(frozenset([int(label)]) for label in labels))

    @classmethod
    def equal_blocks(cls, n: int, block_count: int) -> BlockAffiliation:
        """Split nodes into ``block_count`` consecutive blocks of (nearly) equal size."""
        if not 1 <= block_count <= n:
            raise ValidationError(f"block_count must lie in [1, {n}], got {block_count}")
        return cls.from_labels([i * block_count // n for i in range(n)])

    @classmethod
    def ring(cls, n: int, block_count: int) -> BlockAffiliation:
        """Overlapping communities laid on a ring.

        Nodes are cut into ``block_count`` consecutive segments; community c
        covers segments c and c + 1 (mod ``block_count``), so every node is in
        exactly two communities and each community shares one segment with
        each neighbour.
        """
        if not 2 <= block_count <= n:
            raise ValidationError(f"block_count must lie in [2, {n}], got {block_count}")
        memberships: list[frozenset[int]] = []
        for i in range(n):
            segment = i * block_count // n
            memberships.append(frozenset({segment, (segment - 1) % block_count}))
        return cls(tuple(memberships))

    @property
    def n(self) -> int:
        return len(self.memberships)

    @property
    def overlapping(self) -> bool:
        return any(len(blocks) > 1 for blocks in self.memberships)

    @property
    def block_ids(self) -> list[int]:
        return sorted(set().union(*self.memberships))

    def membership_matrix(self) -> npt.NDArray[np.bool_]:
        """``n x B`` boolean matrix, True where a node belongs to a block."""
        ids = {block: j for j, block in enumerate(self.block_ids)}
        matrix = np.zeros((self.n, len(ids)), dtype=bool)
        for node, blocks in enumerate(self.memberships):
            matrix[node, [ids[b] for b in blocks]] = True
        return matrix

    def display_order(self) -> npt.NDArray[np.int64]:
        keys = [min(blocks) for blocks in self.memberships]
        return np.argsort(np.asarray(keys), kind="stable").astype(np.int64)


def _share_block_costs(affiliation: BlockAffiliation) -> npt.NDArray[np.float64]:
    """0 for pairs sharing at least one block, 1 otherwise, lexicographic order."""
    matrix = affiliation.membership_matrix().astype(np.int64)
    u, v = pair_arrays(affiliation.n)
    shared = np.einsum("ij,ij->i", matrix[u], matrix[v]) > 0
    return np.where(shared, 0.0, 1.0)


def _as_affiliation(n: int, blocks: BlockAffiliation | Sequence[int] | int) -> BlockAffiliation:
    if isinstance(blocks, BlockAffiliation):
        affiliation = blocks
    elif isinstance(blocks, int | np.integer):
        affiliation = BlockAffiliation.equal_blocks(n, int(blocks))
    else:
        affiliation = BlockAffiliation.from_labels(blocks)
    if affiliation.n != n:
        raise ValidationError(f"Block affiliation covers {affiliation.n} nodes but n={n}")
    return affiliation


def blocks_assortative(
    n: int,
    blocks: BlockAffiliation | Sequence[int] | int = 4,
    seed: int = 0,
    *,
    name: str = "blocks_assortative",
) -> RankModel:
    """Intra-block pairs rank before inter-block pairs.

    ``blocks`` is an affiliation, a label per node, or a block count for equal
    consecutive blocks. Overlapping affiliations count a pair as intra-block
    when the two nodes share any block.
    """
    affiliation = _as_affiliation(n, blocks)
    return rank_from_costs(
        n,
        _share_block_costs(affiliation),
        tie_seed=seed,
        name=name,
        node_order=affiliation.display_order(),
    )


def blocks_overlapping(
    n: int,
    block_count: int = 8,
    seed: int = 0,
    *,
    affiliation: BlockAffiliation | None = None,
) -> RankModel:
    """Pairs sharing at least one community rank first.

    Without an explicit ``affiliation`` the communities are laid on a ring
    (see :meth:`BlockAffiliation.ring`).
    """
    if affiliation is None:
        affiliation = BlockAffiliation.ring(n, block_count)
    return blocks_assortative(n, affiliation, seed, name="blocks_overlapping")


def clique_size(n: int, m: float) -> int:
    """Clique size so that floor(n / size) cliques hold about m edges.

    A clique of size s gives each member s - 1 neighbours, so the size is the
    mean degree 2m/n rounded up, plus one.
    """
    mean_degree = 2.0 * m / n
    return math.ceil(mean_degree) + 1


def disconnected_cliques(n: int, m: float, seed: int = 0) -> RankModel:
    """Densest disconnected communities able to hold ``m`` edges at epsilon = 0.

    Nodes are grouped in floor(n / n_c) consecutive cliques of size n_c; the
    remaining nodes form one extra community.
    """
    if not 0 <= m <= pair_count(n):
        raise InfeasibleDensityError(m, pair_count(n))
    size = clique_size(n, m)
    labels = [i // size for i in range(n)] if size < n else [0] * n
    logger.debug("Disconnected cliques: n=%d m=%g clique size=%d", n, m, size)
    return blocks_assortative(n, labels, seed, name="disconnected_cliques")
