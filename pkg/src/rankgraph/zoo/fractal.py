"""Fractal structures: nodes embedded in complete binary or ternary trees.

Trees are stored in heap order: position 0 is the root and the parent of
position i is (i - 1) // arity. The height of a position is the height of
its subtree, so every leaf has height 0 and the root has the tree height h(T).
"""

from __future__ import annotations

import logging
from dataclasses import dataclass
from functools import cached_property
from typing import TYPE_CHECKING, Literal

import numpy as np
import numpy.typing as npt

from rankgraph.errors import ValidationError
from rankgraph.rank import pair_arrays, rank_from_costs

if TYPE_CHECKING:
    from rankgraph.rank import RankModel

logger = logging.getLogger(__name__)

Placement = Literal["leaves", "all"]


@dataclass(frozen=True, eq=False)
class TreeEmbedding:
    """Nodes placed on the positions of a complete ``arity``-ary tree."""

    arity: int
    placement: Placement
    size: int
    """Number of positions in the tree."""
    positions: npt.NDArray[np.int64]
    """``positions[u]`` is the tree position of node ``u``."""

    @classmethod
    def complete(cls, n: int, arity: int = 2, placement: Placement = "all") -> TreeEmbedding:
        """Embed ``n`` nodes in a complete tree.

        ``"all"`` puts node i on heap position i of a tree with n positions.
        ``"leaves"`` builds the smallest perfect tree with at least n leaves
        and uses its leftmost n leaves.
        """
        if arity not in (2, 3):
            raise ValidationError(f"Tree arity must be 2 or 3, got {arity}")
        if n < 1:
            raise ValidationError(f"Need at least one node, got n={n}")
        if placement == "all":
            return cls(arity, placement, n, np.arange(n, dtype=np.int64))
        if placement == "leaves":
            depth = 0
            while arity**depth < n:
                depth += 1
            first_leaf = (arity**depth - 1) // (arity - 1)
            size = first_leaf + arity**depth
            return cls(arity, placement, size, first_leaf + np.arange(n, dtype=np.int64))
        raise ValidationError(f"Unknown placement {placement!r}")

    @cached_property
    def depth(self) -> npt.NDArray[np.int64]:
        """Depth of every tree position, 0 at the root."""
        depth = np.zeros(self.size, dtype=np.int64)
        for i in range(1, self.size):
            depth[i] = depth[(i - 1) // self.arity] + 1
        return depth

    @cached_property
    def subtree_height(self) -> npt.NDArray[np.int64]:
        """Height of the subtree below every position, 0 at the leaves."""
        height = np.zeros(self.size, dtype=np.int64)
        for i in range(self.size - 1, 0, -1):
            parent = (i - 1) // self.arity
            height[parent] = max(height[parent], height[i] + 1)
        return height

    @property
    def height(self) -> int:
        """h(T), the height of the root."""
        return int(self.subtree_height[0])

    def node_height(self, nodes: npt.ArrayLike) -> npt.NDArray[np.int64]:
        """h(u) for nodes: 0 on leaves, h(T) at the root."""
        return self.subtree_height[self.positions[np.asarray(nodes, dtype=np.int64)]]

    def lowest_common_ancestor(
        self, a: npt.ArrayLike, b: npt.ArrayLike
    ) -> npt.NDArray[np.int64]:
        """Tree position of the lowest common ancestor of node pairs."""
        x = self.positions[np.asarray(a, dtype=np.int64)].copy()
        y = self.positions[np.asarray(b, dtype=np.int64)].copy()
        depth = self.depth
        while True:
            dx = depth[x]
            dy = depth[y]
            up_x = dx > dy
            up_y = dy > dx
            same = ~up_x & ~up_y & (x != y)
            if not (up_x.any() or up_y.any() or same.any()):
                return x
            x = np.where(up_x | same, (x - 1) // self.arity, x)
            y = np.where(up_y | same, (y - 1) // self.arity, y)

    def distance(self, a: npt.ArrayLike, b: npt.ArrayLike) -> npt.NDArray[np.int64]:
        """Geodesic distance d^T between the positions of node pairs."""
        x = self.positions[np.asarray(a, dtype=np.int64)]
        y = self.positions[np.asarray(b, dtype=np.int64)]
        lca = self.lowest_common_ancestor(a, b)
        depth = self.depth
        return depth[x] + depth[y] - 2 * depth[lca]

    def is_ancestor_pair(self, a: npt.ArrayLike, b: npt.ArrayLike) -> npt.NDArray[np.bool_]:
        """True where one node of the pair is an ancestor of the other."""
        x = self.positions[np.asarray(a, dtype=np.int64)]
        y = self.positions[np.asarray(b, dtype=np.int64)]
        lca = self.lowest_common_ancestor(a, b)
        return (lca == x) | (lca == y)


def fractal_leaves(n: int, seed: int = 0) -> RankModel:
    """Nodes on the leaves of a binary tree; cost is their tree distance.

    Gives nested blocks: siblings first, then cousins, and so on.
    """
    if n < 2:
        raise ValidationError(f"A rank model needs at least 2 nodes, got n={n}")
    tree = TreeEmbedding.complete(n, arity=2, placement="leaves")
    u, v = pair_arrays(n)
    return rank_from_costs(n, tree.distance(u, v).astype(np.float64), tie_seed=seed, name="fractal_leaves")


def fractal_root(n: int, seed: int = 0) -> RankModel:
    """Nodes on every position of a complete binary tree; cost is d^T(u, v)."""
    if n < 2:
        raise ValidationError(f"A rank model needs at least 2 nodes, got n={n}")
    tree = TreeEmbedding.complete(n, arity=2, placement="all")
    u, v = pair_arrays(n)
    return rank_from_costs(n, tree.distance(u, v).astype(np.float64), tie_seed=seed, name="fractal_root")


def hierarchy_costs(tree: TreeEmbedding, u: npt.ArrayLike, v: npt.ArrayLike) -> npt.NDArray[np.float64]:
    """Descendant/sibling scores of the hierarchical structure.

    Ancestor pairs score D = min(h_u, h_v) + h(T) - max(h_u, h_v), which is 0
    between the root and the bottom level. Other pairs score
    S = d - 2 + h_u on equal heights and d + h(T) otherwise.
    """
    h_u = tree.node_height(u)
    h_v = tree.node_height(v)
    top = tree.height
    distance = tree.distance(u, v)
    descendant = np.minimum(h_u, h_v) + top - np.maximum(h_u, h_v)
    sibling = np.where(h_u == h_v, distance - 2 + h_u, distance + top)
    return np.where(tree.is_ancestor_pair(u, v), descendant, sibling).astype(np.float64)


def fractal_hierarchy(n: int, seed: int = 0) -> RankModel:
    """Hierarchical network on a complete ternary tree.

    Bottom-level nodes close in the tree connect to each other; high nodes
    connect to their low descendants. Hubs end up with low clustering and
    leaves with high clustering.
    """
    if n < 2:
        raise ValidationError(f"A rank model needs at least 2 nodes, got n={n}")
    tree = TreeEmbedding.complete(n, arity=3, placement="all")
    u, v = pair_arrays(n)
    logger.debug("Fractal hierarchy: n=%d tree height=%d", n, tree.height)
    return rank_from_costs(n, hierarchy_costs(tree, u, v), tie_seed=seed, name="fractal_hierarchy")
