"""Run configuration: one dataclass fed by a config file and command-line flags."""

from __future__ import annotations

import json
import logging
import os
from dataclasses import asdict, dataclass, field, fields
from pathlib import Path
from typing import TYPE_CHECKING, Any

try:
    import tomllib
except ModuleNotFoundError:  # Python < 3.11
    import tomli as tomllib

from rankgraph.errors import ConfigurationError
from rankgraph.rank import pair_count
from rankgraph.streams import check_seed

if TYPE_CHECKING:
    from collections.abc import Mapping

logger = logging.getLogger(__name__)

SEED_ENV_VAR = "RANKGRAPH_SEED"
_PATH_FIELDS = ("positions", "affiliations", "costs", "output")
MATRIX_FORMATS = ("pgm", "csv")


@dataclass
class RunConfig:
    """Everything needed to reproduce one command invocation."""

    command: str = "generate"
    """Subcommand the configuration was built for."""

    structure: str = "nested"
    """Zoo structure name, or ``custom`` for a cost file."""

    n: int = 128
    """Number of nodes."""

    m: float | None = None
    """Expected number of edges."""

    k: float | None = None
    """Mean degree; m = n * k / 2."""

    density: float | None = None
    """Share of node pairs; m = density * L."""

    epsilon: float = 0.5
    """Randomness of the rank-probability profile."""

    epsilons: list[float] | None = None
    """Epsilon grid for curves and sweeps."""

    tie_seed: int | None = None
    """Seed of the tie-breaking stream."""

    sample_seed: int | None = None
    """Seed of the edge-sampling stream."""

    count: int = 1
    """Number of graphs to generate."""

    runs: int = 5
    """Graphs per epsilon in small-world sweeps."""

    workers: int = 1
    """Threads used for batch sampling and scoring."""

    params: dict[str, Any] = field(default_factory=dict)
    """Structure parameters (d, blocks, block_count, octaves, variant, metric, center)."""

    positions: Path | None = None
    """CSV of node coordinates, one row per node."""

    affiliations: Path | None = None
    """CSV of node_id,block_id rows."""

    costs: Path | None = None
    """CSV of u,v,cost rows for a custom structure."""

    penalty: float = 1.0
    """Extra cost for pairs whose labels differ in attribute-driven costs."""

    output: Path | None = None
    """Output file or directory."""

    adjacency_pgm: bool = False
    """generate: also write an adjacency image per graph."""

    matrix_format: str = "pgm"
    """rank-matrix: ``pgm`` or ``csv``."""

    gallery: bool = False
    """rank-matrix: render every zoo structure."""

    probabilities: bool = False
    """rank-matrix: also write the edge probability matrix."""

    natural_order: bool = False
    """rank-matrix: keep node ids in index order."""

    samples: int = 257
    """prob-curve: points on the cumulative curve."""

    zoo: bool = False
    """smallworld: profile every zoo structure."""

    def has_density(self) -> bool:
        return any(value is not None for value in (self.m, self.k, self.density))

    def resolve_m(self, n: int | None = None) -> float:
        """Expected edge count from whichever density specifier is set."""
        n = self.n if n is None else n
        if self.m is not None:
            return float(self.m)
        if self.k is not None:
            return n * float(self.k) / 2
        if self.density is not None:
            return float(self.density) * pair_count(n)
        raise ConfigurationError("One of m, k or density is required")

    def validate(self, *, require_density: bool = True) -> RunConfig:
        """Check the configuration before any computation starts."""
        if self.n < 2:
            raise ConfigurationError(f"n must be at least 2, got {self.n}")
        given = [name for name in ("m", "k", "density") if getattr(self, name) is not None]
        if len(given) > 1:
            raise ConfigurationError(f"Give exactly one of m, k, density (got {', '.join(given)})")
        if require_density and not given:
            raise ConfigurationError("One of m, k or density is required")
        if self.density is not None and not 0 <= self.density <= 1:
            raise ConfigurationError(f"density must lie in [0, 1], got {self.density}")
        for value in [self.epsilon, *(self.epsilons or [])]:
            if not 0 <= value <= 1:
                raise ConfigurationError(f"epsilon must lie in [0, 1], got {value}")
        for name in ("count", "runs", "workers"):
            if getattr(self, name) < 1:
                raise ConfigurationError(f"{name} must be at least 1, got {getattr(self, name)}")
        if self.matrix_format not in MATRIX_FORMATS:
            raise ConfigurationError(
                f"matrix_format must be one of {', '.join(MATRIX_FORMATS)}, got {self.matrix_format!r}"
            )
        if self.samples < 2:
            raise ConfigurationError(f"samples must be at least 2, got {self.samples}")
        for name in ("tie_seed", "sample_seed"):
            value = getattr(self, name)
            if value is not None:
                try:
                    check_seed(value)
                except (TypeError, ValueError) as e:
                    raise ConfigurationError(f"{name}: {e}") from None
        for name in ("positions", "affiliations", "costs"):
            path = getattr(self, name)
            if path is not None and not path.exists():
                raise FileNotFoundError(f"{name} file not found: {path}")
        return self

    def to_dict(self) -> dict[str, Any]:
        """JSON-ready mapping; paths become strings."""
        data = asdict(self)
        for name in _PATH_FIELDS:
            if data[name] is not None:
                data[name] = str(data[name])
        return data


def _read_file(config_path: Path) -> dict[str, Any]:
    if not config_path.exists():
        raise FileNotFoundError(f"Config file not found: {config_path}")
    if config_path.suffix == ".json":
        data = json.loads(config_path.read_text())
    else:
        with config_path.open("rb") as f:
            data = tomllib.load(f)
    # manifests and TOML files both keep the run under a "run" table
    run = data.get("run", data)
    if not isinstance(run, dict):
        raise ConfigurationError(f"{config_path}: 'run' must be a table")
    return run


def _env_seed() -> int | None:
    raw = os.environ.get(SEED_ENV_VAR)
    if raw is None or raw == "":
        return None
    try:
        return check_seed(int(raw))
    except ValueError:
        raise ConfigurationError(f"{SEED_ENV_VAR} must be a non-negative integer, got {raw!r}") from None


def load_config(
    config_path: Path | None = None,
    *,
    defaults: Mapping[str, Any] | None = None,
    **overrides: Any,
) -> RunConfig:
    """Load a run configuration from a file, with command-line overrides.

    ``defaults`` replace the dataclass defaults for one command. File values
    come next; overrides that are not None replace them. Seeds left unset
    fall back to ``RANKGRAPH_SEED``, then 0.
    """
    known = {f.name for f in fields(RunConfig)}
    values: dict[str, Any] = dict(defaults or {})
    if config_path is not None:
        file_values = _read_file(config_path)
        unknown = sorted(set(file_values) - known)
        if unknown:
            raise ConfigurationError(f"{config_path}: unknown setting(s) {', '.join(unknown)}")
        values.update(file_values)
        logger.debug("Loaded %d settings from %s", len(file_values), config_path)

    for key, value in overrides.items():
        if key not in known:
            raise ConfigurationError(f"Unknown setting {key!r}")
        if value is None:
            continue
        if key == "params":
            values["params"] = {**values.get("params", {}), **value}
        else:
            values[key] = value

    for name in _PATH_FIELDS:
        if values.get(name) is not None:
            values[name] = Path(values[name])
    if values.get("epsilons") is not None:
        values["epsilons"] = [float(e) for e in values["epsilons"]]

    config = RunConfig(**values)
    env_seed = _env_seed()
    default_seed = env_seed if env_seed is not None else 0
    if config.tie_seed is None:
        config.tie_seed = default_seed
    if config.sample_seed is None:
        config.sample_seed = default_seed
    return config
