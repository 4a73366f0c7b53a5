"""File formats: matrices, curves, edge lists, manifests and input tables.

Every writer builds the full file in memory and moves it into place with an
atomic rename, so a failed command never leaves a partial file behind.
"""

from __future__ import annotations

import csv
import io
import json
import logging
import math
import os
import tempfile
from pathlib import Path
from typing import TYPE_CHECKING, Any

import numpy as np
import numpy.typing as npt

from rankgraph.errors import NonFiniteCostError, ValidationError
from rankgraph.profile import cumulative_curve, probability_matrix
from rankgraph.rank import pair_arrays, pair_count, pair_index, rank_matrix
from rankgraph.sampler import Graph
from rankgraph.zoo.blocks import BlockAffiliation
from rankgraph.zoo.spatial import Positions

if TYPE_CHECKING:
    from collections.abc import Iterable, Sequence

    from rankgraph.config import RunConfig
    from rankgraph.metrics import ProfileResult
    from rankgraph.profile import ProbabilityProfile
    from rankgraph.rank import RankModel

logger = logging.getLogger(__name__)

PROFILE_HEADER = (
    "structure",
    "n",
    "m",
    "epsilon",
    "cc_mean",
    "cc_std",
    "delta_hat_mean",
    "delta_hat_std",
    "gcc_fraction_mean",
    "mean_distance_mean",
    "runs",
)


def atomic_write_bytes(path: Path, data: bytes) -> Path:
    """Write ``data`` to a temporary file next to ``path``, then rename it over ``path``."""
    path.parent.mkdir(parents=True, exist_ok=True)
    fd, tmp_name = tempfile.mkstemp(prefix=f".{path.name}.", dir=path.parent)
    try:
        with os.fdopen(fd, "wb") as f:
            f.write(data)
        Path(tmp_name).replace(path)
    except BaseException:
        Path(tmp_name).unlink(missing_ok=True)
        raise
    logger.debug("Wrote %d bytes to %s", len(data), path)
    return path


def atomic_write_text(path: Path, text: str) -> Path:
    return atomic_write_bytes(path, text.encode("utf-8"))


def atomic_write_many(files: Sequence[tuple[Path, bytes]]) -> list[Path]:
    """Stage every file as a temporary sibling, then rename them all into place.

    Nothing is renamed until every file has been staged; on failure the
    staged files are removed.
    """
    staged: list[tuple[Path, Path]] = []
    try:
        for path, data in files:
            path.parent.mkdir(parents=True, exist_ok=True)
            fd, tmp_name = tempfile.mkstemp(prefix=f".{path.name}.", dir=path.parent)
            staged.append((Path(tmp_name), path))
            with os.fdopen(fd, "wb") as f:
                f.write(data)
        while staged:
            tmp, path = staged[0]
            tmp.replace(path)
            staged.pop(0)
    except BaseException:
        for tmp, _path in staged:
            tmp.unlink(missing_ok=True)
        raise
    logger.debug("Wrote %d files", len(files))
    return [path for path, _data in files]


def _csv_text(header: Sequence[str] | None, rows: Iterable[Sequence[Any]]) -> str:
    buffer = io.StringIO()
    writer = csv.writer(buffer, lineterminator="\n")
    if header is not None:
        writer.writerow(header)
    writer.writerows(rows)
    return buffer.getvalue()


def _pgm(pixels: npt.NDArray[np.uint8]) -> bytes:
    """Binary 8-bit greymap (P5) with maxval 255."""
    height, width = pixels.shape
    return f"P5\n{width} {height}\n255\n".encode("ascii") + pixels.tobytes()


# Rank and probability matrices


def write_rank_matrix_csv(model: RankModel, path: Path, *, display_order: bool = True) -> Path:
    """Integer ranks, empty cells on the diagonal."""
    matrix = rank_matrix(model, display_order=display_order)
    rows = [
        ["" if i == j else str(value) for j, value in enumerate(row)]
        for i, row in enumerate(matrix.tolist())
    ]
    return atomic_write_text(path, _csv_text(None, rows))


def rank_pixels(model: RankModel, *, display_order: bool = True) -> npt.NDArray[np.uint8]:
    """Grey levels: rank 1 black, rank L white, diagonal white."""
    matrix = rank_matrix(model, display_order=display_order).astype(np.float64)
    span = max(model.pair_count - 1, 1)
    pixels = np.rint(255.0 * (matrix - 1.0) / span)
    np.fill_diagonal(pixels, 255.0)
    return np.clip(pixels, 0, 255).astype(np.uint8)


def write_rank_matrix_pgm(model: RankModel, path: Path, *, display_order: bool = True) -> Path:
    return atomic_write_bytes(path, _pgm(rank_pixels(model, display_order=display_order)))


def _ordered_probabilities(
    model: RankModel, profile: ProbabilityProfile, display_order: bool
) -> npt.NDArray[np.float64]:
    matrix = probability_matrix(model, profile)
    if display_order and model.node_order is not None:
        matrix = matrix[np.ix_(model.node_order, model.node_order)]
    return matrix


def write_probability_matrix_csv(
    model: RankModel, profile: ProbabilityProfile, path: Path, *, display_order: bool = True
) -> Path:
    matrix = _ordered_probabilities(model, profile, display_order)
    rows = [
        ["" if i == j else repr(value) for j, value in enumerate(row)]
        for i, row in enumerate(matrix.tolist())
    ]
    return atomic_write_text(path, _csv_text(None, rows))


def write_probability_matrix_pgm(
    model: RankModel, profile: ProbabilityProfile, path: Path, *, display_order: bool = True
) -> Path:
    """Probability 1 is black, 0 is white."""
    matrix = _ordered_probabilities(model, profile, display_order)
    pixels = np.rint(255.0 * (1.0 - matrix))
    np.fill_diagonal(pixels, 255.0)
    return atomic_write_bytes(path, _pgm(np.clip(pixels, 0, 255).astype(np.uint8)))


# Probability curves


def write_probability_curves(profiles: Sequence[ProbabilityProfile], path: Path) -> Path:
    """Rows ``epsilon,r,p`` for every rank of every profile."""
    rows: list[tuple[float, int, float]] = []
    for profile in profiles:
        ranks = range(1, profile.pair_count + 1)
        rows.extend(zip([profile.epsilon] * profile.pair_count, ranks, profile.probabilities.tolist(), strict=True))
    return atomic_write_text(path, _csv_text(("epsilon", "r", "p"), rows))


def write_cumulative_curves(
    profiles: Sequence[ProbabilityProfile], path: Path, samples: int = 257
) -> Path:
    """Rows ``epsilon,x,y`` sampling the cumulative edge curve of every profile."""
    rows: list[tuple[float, float, float]] = []
    for profile in profiles:
        xs, ys = cumulative_curve(profile, samples)
        rows.extend((profile.epsilon, x, y) for x, y in zip(xs.tolist(), ys.tolist(), strict=True))
    return atomic_write_text(path, _csv_text(("epsilon", "x", "y"), rows))


# Graphs


def edge_list_text(graph: Graph) -> str:
    meta = graph.metadata
    header = [f"# n={graph.n} edges={graph.edge_count}"]
    for key in ("structure", "m", "epsilon", "tie_seed", "sample_seed"):
        if key in meta:
            header.append(f"# {key}={meta[key]}")
    lines = [f"{u}\t{v}" for u, v in graph.edges.tolist()]
    return "\n".join(header + lines) + "\n"


def write_edge_list(graph: Graph, path: Path) -> Path:
    """One ``u<TAB>v`` line per edge, after ``#`` comment lines holding n, m, epsilon and seeds."""
    return atomic_write_text(path, edge_list_text(graph))


def read_edge_list(path: Path) -> Graph:
    """Read a file written by :func:`write_edge_list`."""
    if not path.exists():
        raise FileNotFoundError(f"Edge list not found: {path}")
    n: int | None = None
    metadata: dict[str, Any] = {}
    edges: list[tuple[int, int]] = []
    for line_no, line in enumerate(path.read_text().splitlines(), start=1):
        if line.startswith("#"):
            for item in line[1:].split():
                key, _, value = item.partition("=")
                if key == "n":
                    n = int(value)
                elif key != "edges":
                    metadata[key] = value
            continue
        if not line.strip():
            continue
        parts = line.split("\t")
        if len(parts) != 2:
            raise ValidationError(f"{path}:{line_no}: expected 'u<TAB>v', got {line!r}")
        edges.append((int(parts[0]), int(parts[1])))
    if n is None:
        n = max((max(e) for e in edges), default=-1) + 1
    return Graph.from_edges(n, edges, metadata)


def adjacency_pgm(graph: Graph) -> bytes:
    """Adjacency matrix image: edges black, non-edges white."""
    pixels = np.full((graph.n, graph.n), 255, dtype=np.uint8)
    u = graph.edges[:, 0]
    v = graph.edges[:, 1]
    pixels[u, v] = 0
    pixels[v, u] = 0
    return _pgm(pixels)


def write_adjacency_pgm(graph: Graph, path: Path) -> Path:
    return atomic_write_bytes(path, adjacency_pgm(graph))


# Experiment outputs


def write_manifest(path: Path, config: RunConfig, outputs: Sequence[Path]) -> Path:
    """JSON record of the run; it loads back as a configuration file."""
    from rankgraph import __version__

    manifest = {
        "rankgraph_version": __version__,
        "run": config.to_dict(),
        "outputs": [str(p) for p in outputs],
    }
    return atomic_write_text(path, json.dumps(manifest, indent=2, sort_keys=True) + "\n")


def profile_rows(result: ProfileResult) -> list[list[Any]]:
    return [
        [
            result.structure,
            result.n,
            result.m,
            row.epsilon,
            row.cc,
            row.cc_std,
            row.delta_hat,
            row.delta_hat_std,
            row.gcc_fraction,
            row.mean_distance,
            row.runs,
        ]
        for row in result.rows
    ]


def write_profile_result(result: ProfileResult, path: Path) -> Path:
    return atomic_write_text(path, _csv_text(PROFILE_HEADER, profile_rows(result)))


# Input tables


def _is_numeric(row: Sequence[str]) -> bool:
    try:
        for cell in row:
            float(cell)
    except ValueError:
        return False
    return True


def _read_rows(path: Path) -> list[list[str]]:
    """Non-empty, non-comment CSV rows; a leading non-numeric row is a header and skipped."""
    if not path.exists():
        raise FileNotFoundError(f"File not found: {path}")
    with path.open(newline="") as f:
        rows = [
            [cell.strip() for cell in row]
            for row in csv.reader(f)
            if row and any(cell.strip() for cell in row) and not row[0].lstrip().startswith("#")
        ]
    if rows and not _is_numeric(rows[0]):
        rows = rows[1:]
    return rows


def _parse_float(path: Path, line: int, cell: str) -> float:
    try:
        return float(cell)
    except ValueError:
        raise ValidationError(f"{path}: row {line}: {cell!r} is not a number") from None


def _parse_node(path: Path, line: int, cell: str) -> int:
    try:
        return int(cell)
    except ValueError:
        raise ValidationError(f"{path}: row {line}: {cell!r} is not a node id") from None


def load_positions(path: Path) -> Positions:
    """CSV of node coordinates: row i holds the d coordinates of node i."""
    rows = _read_rows(path)
    if not rows:
        raise ValidationError(f"{path}: no positions found")
    width = len(rows[0])
    coords = np.empty((len(rows), width), dtype=np.float64)
    for i, row in enumerate(rows, start=1):
        if len(row) != width:
            raise ValidationError(f"{path}: row {i} has {len(row)} columns, expected {width}")
        coords[i - 1] = [_parse_float(path, i, cell) for cell in row]
    return Positions(coords=coords, source="file")


def load_affiliations(path: Path, n: int | None = None) -> BlockAffiliation:
    """CSV of ``node_id,block_id`` rows; repeat a node for overlapping membership."""
    blocks: dict[int, set[int]] = {}
    for i, row in enumerate(_read_rows(path), start=1):
        if len(row) != 2:
            raise ValidationError(f"{path}: row {i}: expected node_id,block_id")
        node = _parse_node(path, i, row[0])
        blocks.setdefault(node, set()).add(_parse_node(path, i, row[1]))
    if n is None:
        n = max(blocks, default=-1) + 1
    for node in range(n):
        if node not in blocks:
            raise ValidationError(f"{path}: node {node} has no block")
    extra = sorted(node for node in blocks if not 0 <= node < n)
    if extra:
        raise ValidationError(f"{path}: node {extra[0]} outside [0, {n})")
    return BlockAffiliation(tuple(frozenset(blocks[node]) for node in range(n)))


class TableCost:
    """A cost function backed by an explicit table of pair costs."""

    def __init__(self, n: int, costs: npt.NDArray[np.float64]) -> None:
        self.n = n
        self.costs = costs

    def __call__(self, u: int, v: int, n: int) -> float:
        if n != self.n:
            raise ValidationError(f"Cost table covers n={self.n} nodes, asked for n={n}")
        return float(self.costs[int(pair_index(self.n, u, v))])


def load_custom_cost(path: Path, n: int | None = None) -> TableCost:
    """Load ``u,v,cost`` rows covering every pair of nodes.

    ``n`` defaults to the largest node id plus one. A missing pair is an
    error naming the first one in lexicographic order.
    """
    entries: dict[tuple[int, int], float] = {}
    for i, row in enumerate(_read_rows(path), start=1):
        if len(row) != 3:
            raise ValidationError(f"{path}: row {i}: expected u,v,cost")
        a, b = _parse_node(path, i, row[0]), _parse_node(path, i, row[1])
        u, v = min(a, b), max(a, b)
        if u == v or u < 0:
            raise ValidationError(f"{path}: row {i}: invalid pair ({a}, {b})")
        value = _parse_float(path, i, row[2])
        if not math.isfinite(value):
            raise NonFiniteCostError(u, v, value)
        if entries.get((u, v), value) != value:
            raise ValidationError(f"{path}: conflicting costs for pair ({u}, {v})")
        entries[(u, v)] = value

    if n is None:
        n = max((v for _, v in entries), default=0) + 1
    if n < 2:
        raise ValidationError(f"{path}: need costs for at least 2 nodes")

    costs = np.full(pair_count(n), np.nan)
    for (u, v), value in entries.items():
        if v >= n:
            raise ValidationError(f"{path}: pair ({u}, {v}) outside n={n}")
        costs[int(pair_index(n, u, v))] = value
    missing = np.flatnonzero(np.isnan(costs))
    if missing.size:
        us, vs = pair_arrays(n)
        first = int(missing[0])
        raise ValidationError(
            f"{path}: missing cost for pair ({us[first]}, {vs[first]}) "
            f"({missing.size} of {costs.size} pairs missing)"
        )
    logger.debug("Loaded %d pair costs for n=%d from %s", costs.size, n, path)
    return TableCost(n, costs)
