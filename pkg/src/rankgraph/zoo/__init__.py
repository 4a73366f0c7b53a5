"""The structure zoo: named rank models and a registry to build them by name."""

from __future__ import annotations

import logging
import re
from collections.abc import Callable, Mapping
from dataclasses import dataclass, field
from typing import TYPE_CHECKING, Any

from rankgraph.errors import UnknownStructureError, ValidationError
from rankgraph.zoo.blocks import (
    BlockAffiliation,
    blocks_assortative,
    blocks_overlapping,
    clique_size,
    disconnected_cliques,
)
from rankgraph.zoo.fractal import TreeEmbedding, fractal_hierarchy, fractal_leaves, fractal_root
from rankgraph.zoo.ordering import erdos_renyi, nested, star, watts_strogatz_rank
from rankgraph.zoo.perlin import PerlinNoise, noise_image, perlin
from rankgraph.zoo.spatial import Positions, attribute_cost, attribute_costs, core_periphery, spatial

if TYPE_CHECKING:
    from rankgraph.rank import RankModel

logger = logging.getLogger(__name__)

__all__ = [
    "BlockAffiliation",
    "PerlinNoise",
    "Positions",
    "StructureEntry",
    "TreeEmbedding",
    "ZooSpec",
    "attribute_cost",
    "attribute_costs",
    "available_structures",
    "blocks_assortative",
    "blocks_overlapping",
    "build_structure",
    "clique_size",
    "core_periphery",
    "default_k",
    "disconnected_cliques",
    "erdos_renyi",
    "fractal_hierarchy",
    "fractal_leaves",
    "fractal_root",
    "get_entry",
    "nested",
    "noise_image",
    "normalize_structure_name",
    "perlin",
    "spatial",
    "star",
    "watts_strogatz_rank",
]


@dataclass(frozen=True)
class ZooSpec:
    """A structure name plus its structure-specific parameters."""

    name: str
    params: Mapping[str, Any] = field(default_factory=dict)


@dataclass(frozen=True)
class StructureEntry:
    name: str
    summary: str
    build: Callable[..., RankModel]
    """Called as ``build(n, m, seed, **params)``."""
    params: tuple[str, ...] = ()


def normalize_structure_name(name: str) -> str:
    """Normalize a structure name: ``Blocks-Assortative`` -> ``blocks_assortative``."""
    return re.sub(r"[-_.\s]+", "_", name.strip()).lower()


def default_k(n: int, m: float) -> int:
    """Even mean degree closest to 2m/n, clamped to [2, n - 1]."""
    k = max(2, 2 * round(m / n))
    if k >= n:
        k = n - 1 if (n - 1) % 2 == 0 else n - 2
    return k


def _spatial(n: int, _m: float, seed: int, **params: Any) -> RankModel:
    return spatial(n, seed=seed, **params)


def _core_periphery(n: int, _m: float, seed: int, **params: Any) -> RankModel:
    return core_periphery(n, seed=seed, **params)


def _blocks(n: int, _m: float, seed: int, **params: Any) -> RankModel:
    return blocks_assortative(n, params.get("blocks", 4), seed)


def _overlapping(n: int, _m: float, seed: int, **params: Any) -> RankModel:
    return blocks_overlapping(n, params.get("block_count", 8), seed, affiliation=params.get("affiliation"))


def _cliques(n: int, m: float, seed: int, **_params: Any) -> RankModel:
    return disconnected_cliques(n, m, seed)


def _perlin(n: int, _m: float, seed: int, **params: Any) -> RankModel:
    return perlin(n, seed=seed, **params)


def _watts_strogatz(n: int, m: float, seed: int, **params: Any) -> RankModel:
    k = params.pop("k", None)
    return watts_strogatz_rank(n, default_k(n, m) if k is None else int(k), seed, **params)


def _index_only(builder: Callable[[int, int], RankModel]) -> Callable[..., RankModel]:
    def build(n: int, _m: float, seed: int, **_params: Any) -> RankModel:
        return builder(n, seed)

    return build


_ENTRIES: tuple[StructureEntry, ...] = (
    StructureEntry("erdos_renyi", "No structure, all pairs tied", _index_only(erdos_renyi)),
    StructureEntry("spatial", "Closer latent positions rank first", _spatial, ("d", "positions", "metric")),
    StructureEntry("blocks_assortative", "Intra-block pairs rank first", _blocks, ("blocks",)),
    StructureEntry(
        "blocks_overlapping",
        "Pairs sharing a ring community rank first",
        _overlapping,
        ("block_count", "affiliation"),
    ),
    StructureEntry("disconnected_cliques", "Cliques sized to hold m edges", _cliques),
    StructureEntry("nested", "cost = u + v", _index_only(nested)),
    StructureEntry("star", "cost = u * n + v", _index_only(star)),
    StructureEntry(
        "core_periphery",
        "Distance times both distances to the center",
        _core_periphery,
        ("d", "positions", "center", "metric"),
    ),
    StructureEntry("perlin", "Perlin noise image as costs", _perlin, ("octaves", "frequency")),
    StructureEntry("fractal_leaves", "Tree distance between leaves", _index_only(fractal_leaves)),
    StructureEntry("fractal_root", "Tree distance, nodes on all positions", _index_only(fractal_root)),
    StructureEntry("fractal_hierarchy", "Ternary tree hierarchy", _index_only(fractal_hierarchy)),
    StructureEntry("watts_strogatz", "Ring lattice of mean degree k", _watts_strogatz, ("k", "variant")),
)

_REGISTRY: dict[str, StructureEntry] = {entry.name: entry for entry in _ENTRIES}


def available_structures() -> list[str]:
    """Zoo names in gallery order."""
    return [entry.name for entry in _ENTRIES]


def get_entry(name: str) -> StructureEntry:
    key = normalize_structure_name(name)
    try:
        return _REGISTRY[key]
    except KeyError:
        raise UnknownStructureError(name, available_structures()) from None


def build_structure(spec: ZooSpec | str, n: int, m: float, seed: int = 0) -> RankModel:
    """Build the rank model named by ``spec``.

    ``m`` is the target edge count; only structures sized from it
    (disconnected cliques, Watts-Strogatz without ``k``) read it.
    """
    if isinstance(spec, str):
        spec = ZooSpec(spec)
    entry = get_entry(spec.name)
    params = {key: value for key, value in spec.params.items() if value is not None}
    unknown = sorted(set(params) - set(entry.params))
    if unknown:
        accepted = ", ".join(entry.params) or "none"
        raise ValidationError(
            f"Structure {entry.name!r} does not take parameter(s) {', '.join(unknown)} "
            f"(accepted: {accepted})"
        )
    logger.info("Building %s with n=%d, m=%g, seed=%d", entry.name, n, m, seed)
    return entry.build(n, m, seed, **params)
