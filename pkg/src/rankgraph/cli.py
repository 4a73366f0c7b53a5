"""Command-line interface for rankgraph."""

from __future__ import annotations

import json
import sys
from collections.abc import Callable, Iterator
from contextlib import contextmanager
from pathlib import Path
from typing import Any, TypeVar

import click
import numpy as np
from rich.console import Console
from rich.markup import escape
from rich.panel import Panel
from rich.progress import BarColumn, MofNCompleteColumn, Progress, TextColumn, TimeElapsedColumn
from rich.table import Table

from rankgraph import __version__, io
from rankgraph.config import MATRIX_FORMATS, RunConfig, load_config
from rankgraph.errors import ConfigurationError, RankGraphError, ValidationError
from rankgraph.log import setup_logging, verbosity_level
from rankgraph.metrics import DEFAULT_EPSILONS, DEFAULT_RUNS, MetricRow, smallworld_profile, zoo_profiles
from rankgraph.profile import probability_vector
from rankgraph.rank import RankModel, rank_from_costs
from rankgraph.sampler import GeneratorSpec, generate, generate_batch
from rankgraph.zoo import ZooSpec, available_structures, build_structure, get_entry, normalize_structure_name
from rankgraph.zoo.spatial import attribute_costs

console = Console()
err_console = Console(stderr=True)

EXIT_VALIDATION = 2
EXIT_RUNTIME = 3

PROB_CURVE_EPSILONS = (0.0, 1e-3, 1e-2, 0.1, 0.5, 0.9, 0.99, 1.0)
"""Default epsilon list of ``prob-curve``."""

F = TypeVar("F", bound=Callable[..., Any])

_FLAGS = ("adjacency_pgm", "gallery", "probabilities", "natural_order", "zoo")


@contextmanager
def _command_errors() -> Iterator[None]:
    """Print errors and exit: 2 for bad input, 3 for failures while computing."""
    try:
        yield
    except (ValidationError, FileNotFoundError) as e:
        err_console.print(f"[red]🔧 Error:[/red] {escape(str(e))}")
        sys.exit(EXIT_VALIDATION)
    except (RankGraphError, ArithmeticError, FloatingPointError) as e:
        err_console.print(f"[red]🔧 Error:[/red] {escape(str(e))}")
        sys.exit(EXIT_RUNTIME)


def _parse_params(items: tuple[str, ...]) -> dict[str, Any] | None:
    """Turn ``key=value`` pairs into a dict; values are read as JSON when possible."""
    if not items:
        return None
    params: dict[str, Any] = {}
    for item in items:
        key, sep, raw = item.partition("=")
        if not sep or not key:
            raise click.BadParameter(f"expected KEY=VALUE, got {item!r}", param_hint="--param")
        try:
            params[key.strip()] = json.loads(raw)
        except json.JSONDecodeError:
            params[key.strip()] = raw
    return params


def run_options(f: F) -> F:
    """Options shared by every command that builds a structure."""
    options = [
        click.option("-c", "--config", type=click.Path(path_type=Path), help="TOML or JSON config file (a manifest works too)"),
        click.option("-s", "--structure", help="Zoo structure name, 'custom' (--costs) or 'attribute' (--positions + --affiliations)"),
        click.option("-n", "--nodes", "n", type=int, help="Number of nodes"),
        click.option("--m", "m", type=float, help="Expected number of edges"),
        click.option("--k", "k", type=float, help="Mean degree (m = n*k/2)"),
        click.option("--density", type=float, help="Share of node pairs (m = density*L)"),
        click.option("--tie-seed", type=int, help="Seed for tie breaking (default: $RANKGRAPH_SEED or 0)"),
        click.option("--sample-seed", type=int, help="Seed for edge sampling (default: $RANKGRAPH_SEED or 0)"),
        click.option("-p", "--param", "params", multiple=True, help="Structure parameter KEY=VALUE (repeatable)"),
        click.option("--positions", type=click.Path(path_type=Path), help="CSV of node positions"),
        click.option("--affiliations", type=click.Path(path_type=Path), help="CSV of node_id,block_id rows"),
        click.option("--costs", type=click.Path(path_type=Path), help="CSV of u,v,cost rows (structure 'custom')"),
        click.option("--penalty", type=float, help="Label mismatch penalty (structure 'attribute')"),
        click.option("-o", "--output", type=click.Path(path_type=Path), help="Output path"),
    ]
    for option in reversed(options):
        f = option(f)
    return f


def _config(command: str, opts: dict[str, Any], defaults: dict[str, Any] | None = None) -> RunConfig:
    config_path = opts.pop("config")
    # an unset flag must not override a manifest that turned it on
    for key in _FLAGS:
        if opts.get(key) is False:
            opts[key] = None
    opts["params"] = _parse_params(opts.pop("params"))
    return load_config(config_path, defaults=defaults, command=command, **opts)


def _structure_params(cfg: RunConfig, name: str) -> dict[str, Any]:
    params = dict(cfg.params)
    if cfg.positions is not None:
        params["positions"] = io.load_positions(cfg.positions)
    if cfg.affiliations is not None:
        affiliation = io.load_affiliations(cfg.affiliations, cfg.n)
        params["affiliation" if name == "blocks_overlapping" else "blocks"] = affiliation
    return params


def build_model(cfg: RunConfig, m: float) -> RankModel:
    """The rank model a configuration asks for."""
    name = normalize_structure_name(cfg.structure)
    seed = cfg.tie_seed or 0
    if name == "custom":
        if cfg.costs is None:
            raise ConfigurationError("Structure 'custom' needs a --costs file")
        table = io.load_custom_cost(cfg.costs, cfg.n)
        return rank_from_costs(cfg.n, table.costs, tie_seed=seed, name="custom")
    if name == "attribute":
        if cfg.positions is None or cfg.affiliations is None:
            raise ConfigurationError("Structure 'attribute' needs --positions and --affiliations")
        positions = io.load_positions(cfg.positions)
        if positions.n != cfg.n:
            raise ValidationError(f"Positions have {positions.n} rows but n={cfg.n}")
        affiliation = io.load_affiliations(cfg.affiliations, cfg.n)
        labels = np.array([min(blocks) for blocks in affiliation.memberships])
        costs = attribute_costs(positions, labels, cfg.penalty, cfg.params.get("metric", "euclidean"))
        return rank_from_costs(cfg.n, costs, tie_seed=seed, name="attribute")
    return build_structure(ZooSpec(name, _structure_params(cfg, name)), cfg.n, m, seed)


def _numbered(path: Path, index: int, count: int) -> Path:
    if count == 1:
        return path
    return path.with_name(f"{path.stem}-{index:03d}{path.suffix}")


def _manifest_path(output: Path) -> Path:
    if output.suffix:
        return output.with_name(f"{output.stem}.manifest.json")
    return output / "manifest.json"


@click.group()
@click.version_option(__version__, prog_name="rankgraph")
@click.option("-v", "--verbose", count=True, help="More log output (-vv for debug)")
@click.option("-q", "--quiet", is_flag=True, help="Only log errors")
def main(verbose: int, quiet: bool) -> None:
    """🛞 rankgraph - Random graphs from node-pair ranks and a randomness knob."""
    setup_logging(verbosity_level(verbose, quiet), err_console)


@main.command(name="generate")
@run_options
@click.option("-e", "--epsilon", type=float, help="Randomness in [0, 1] (default: 0.5)")
@click.option("--count", type=int, help="Number of graphs (default: 1)")
@click.option("--workers", type=int, help="Threads for batch sampling (default: 1)")
@click.option("--adjacency-pgm", is_flag=True, help="Also write an adjacency image per graph")
def generate_command(**opts: Any) -> None:
    """🛞 Generate graphs and write them as edge lists.

    \b
    Examples:
        rankgraph generate -s nested -n 128 --m 512 -e 0.1 -o nested.tsv
        rankgraph generate -c nested.manifest.json
    """
    with _command_errors():
        cfg = _config("generate", opts).validate()
        m = cfg.resolve_m()
        output = cfg.output or Path(f"{normalize_structure_name(cfg.structure)}.tsv")

        with console.status(f"[bold blue]Building {cfg.structure} (n={cfg.n})..."):
            model = build_model(cfg, m)
            profile = probability_vector(model.pair_count, m, cfg.epsilon)
            spec = GeneratorSpec(model, profile, cfg.sample_seed or 0)

        with console.status(f"[bold blue]Sampling {cfg.count} graph(s)..."):
            if cfg.count == 1:
                graphs = [generate(spec)]
            else:
                graphs = generate_batch(spec, cfg.count, cfg.sample_seed or 0, workers=cfg.workers)

        files: list[tuple[Path, bytes]] = []
        for i, graph in enumerate(graphs):
            path = _numbered(output, i, len(graphs))
            files.append((path, io.edge_list_text(graph).encode("utf-8")))
            if cfg.adjacency_pgm:
                files.append((path.with_suffix(".pgm"), io.adjacency_pgm(graph)))
        outputs = io.atomic_write_many(files)
        cfg.output = output
        manifest = io.write_manifest(_manifest_path(output), cfg, outputs)

        for path, graph in zip(outputs[:: 2 if cfg.adjacency_pgm else 1], graphs, strict=True):
            console.print(f"[green]🛞 Wrote:[/green] [bold]{path}[/bold] ({graph.edge_count} edges)")
        console.print(f"[dim]Manifest: {manifest}[/dim]")


@main.command(name="rank-matrix")
@run_options
@click.option("--format", "matrix_format", type=click.Choice(MATRIX_FORMATS), help="Output format (default: pgm)")
@click.option("--all", "gallery", is_flag=True, help="Render every zoo structure into the output directory")
@click.option("--probabilities", is_flag=True, help="Also write the edge probability matrix")
@click.option("-e", "--epsilon", type=float, help="Randomness for --probabilities (default: 0.5)")
@click.option("--natural-order", is_flag=True, help="Keep node ids in index order instead of latent order")
def rank_matrix_command(**opts: Any) -> None:
    """🛞 Export rank matrices: darker pixels are lower ranks.

    Without a density option, m defaults to 8n (disconnected cliques and
    Watts-Strogatz size themselves from it).
    """
    with _command_errors():
        cfg = _config("rank-matrix", opts).validate(require_density=False)
        if not cfg.has_density():
            cfg.m = 8.0 * cfg.n
        m = cfg.resolve_m()
        display_order = not cfg.natural_order
        fmt = cfg.matrix_format

        models: list[RankModel] = []
        with console.status("[bold blue]Ranking node pairs..."):
            if cfg.gallery:
                models = [build_structure(name, cfg.n, m, cfg.tie_seed or 0) for name in available_structures()]
            else:
                models = [build_model(cfg, m)]

        if cfg.gallery:
            directory = cfg.output or Path("gallery")
            targets = [directory / f"{model.name}.{fmt}" for model in models]
        else:
            directory = None
            targets = [cfg.output or Path(f"{models[0].name}.{fmt}")]

        outputs: list[Path] = []
        for model, target in zip(models, targets, strict=True):
            if fmt == "csv":
                outputs.append(io.write_rank_matrix_csv(model, target, display_order=display_order))
            else:
                outputs.append(io.write_rank_matrix_pgm(model, target, display_order=display_order))
            if cfg.probabilities:
                profile = probability_vector(model.pair_count, m, cfg.epsilon)
                prob_target = target.with_name(f"{target.stem}.probabilities.{fmt}")
                if fmt == "csv":
                    outputs.append(io.write_probability_matrix_csv(model, profile, prob_target, display_order=display_order))
                else:
                    outputs.append(io.write_probability_matrix_pgm(model, profile, prob_target, display_order=display_order))

        cfg.output = directory or targets[0]
        io.write_manifest(_manifest_path(cfg.output), cfg, outputs)
        for path in outputs:
            console.print(f"[green]🛞 Wrote:[/green] [bold]{path}[/bold]")


@main.command(name="prob-curve")
@run_options
@click.option("-e", "--epsilon", "epsilons", type=float, multiple=True, help="Epsilon value (repeatable)")
@click.option("--samples", type=int, help="Points on the cumulative curve (default: 257)")
def prob_curve_command(epsilons: tuple[float, ...], **opts: Any) -> None:
    """🛞 Export P(r) and the cumulative edge curve Y(x) for several epsilons.

    Defaults to n=512, m=128. Writes probabilities.csv and cumulative.csv
    into the output directory.
    """
    with _command_errors():
        opts["epsilons"] = list(epsilons) or None
        cfg = _config("prob-curve", opts, defaults={"n": 512}).validate(require_density=False)
        if not cfg.has_density():
            cfg.m = 128.0
        if cfg.epsilons is None:
            cfg.epsilons = list(PROB_CURVE_EPSILONS)
        m = cfg.resolve_m()
        pairs = cfg.n * (cfg.n - 1) // 2

        with console.status(f"[bold blue]Building {len(cfg.epsilons)} profiles (L={pairs})..."):
            profiles = [probability_vector(pairs, m, e) for e in sorted(set(cfg.epsilons))]

        directory = cfg.output or Path("prob-curve")
        outputs = [
            io.write_probability_curves(profiles, directory / "probabilities.csv"),
            io.write_cumulative_curves(profiles, directory / "cumulative.csv", cfg.samples),
        ]
        cfg.output = directory
        io.write_manifest(directory / "manifest.json", cfg, outputs)

        table = Table(show_header=True, header_style="bold")
        table.add_column("epsilon", justify="right")
        table.add_column("b", justify="right")
        table.add_column("P(1)", justify="right")
        table.add_column("P(L)", justify="right")
        table.add_column("sum P", justify="right")
        for profile in profiles:
            table.add_row(
                f"{profile.epsilon:g}",
                f"{profile.weight:.6g}",
                f"{profile.probabilities[0]:.6g}",
                f"{profile.probabilities[-1]:.6g}",
                f"{profile.expected_edges:.10g}",
            )
        console.print(Panel(table, title=f"[bold]🛞 n={cfg.n}, m={m:g}[/bold]", border_style="blue"))
        for path in outputs:
            console.print(f"[green]🛞 Wrote:[/green] [bold]{path}[/bold]")


@main.command(name="smallworld")
@run_options
@click.option("--zoo", is_flag=True, help="Profile every zoo structure at the same n and m")
@click.option("-e", "--epsilon", "epsilons", type=float, multiple=True, help="Epsilon value (repeatable)")
@click.option("--runs", type=int, help=f"Graphs per epsilon (default: {DEFAULT_RUNS})")
@click.option("--workers", type=int, help="Threads for sampling and scoring (default: 1)")
def smallworld_command(epsilons: tuple[float, ...], **opts: Any) -> None:
    """🛞 Clustering and short-path profiles as epsilon goes from 0 to 1.

    Defaults to the Watts-Strogatz setting n=1000, k=10. Writes one CSV per
    structure into the output directory.

    The default Watts-Strogatz ranking uses the modular neighbourhood rule,
    which is not a ring lattice (cc near 0.43 at epsilon=0 for n=1000,
    k=10). Pass -p variant=ring for the classic ring-lattice sweep.
    """
    with _command_errors():
        opts["epsilons"] = list(epsilons) or None
        cfg = _config(
            "smallworld", opts, defaults={"n": 1000, "structure": "watts_strogatz"}
        ).validate(require_density=False)
        if not cfg.has_density():
            cfg.k = 10.0
        if cfg.epsilons is None:
            cfg.epsilons = list(DEFAULT_EPSILONS)
        m = cfg.resolve_m()
        names = available_structures() if cfg.zoo else [get_entry(cfg.structure).name]

        progress = Progress(
            TextColumn("[bold blue]{task.description}"),
            BarColumn(),
            MofNCompleteColumn(),
            TimeElapsedColumn(),
            console=err_console,
            transient=True,
        )
        with progress:
            task = progress.add_task("profiling", total=len(names) * len(set(cfg.epsilons)))

            def on_row(structure: str, row: MetricRow) -> None:
                progress.update(task, advance=1, description=f"{structure} eps={row.epsilon:g}")

            seeds = {"tie_seed": cfg.tie_seed or 0, "sample_seed": cfg.sample_seed or 0}
            if cfg.zoo:
                results = zoo_profiles(
                    cfg.n, m, names, cfg.epsilons, cfg.runs, workers=cfg.workers, on_row=on_row, **seeds
                )
            else:
                params = _structure_params(cfg, names[0])
                results = [
                    smallworld_profile(
                        ZooSpec(names[0], params),
                        cfg.n,
                        m,
                        cfg.epsilons,
                        cfg.runs,
                        workers=cfg.workers,
                        on_row=on_row,
                        **seeds,
                    )
                ]

        directory = cfg.output or Path("smallworld")
        outputs = [io.write_profile_result(r, directory / f"{r.structure}.csv") for r in results]
        cfg.output = directory
        io.write_manifest(directory / "manifest.json", cfg, outputs)

        for result in results:
            table = Table(show_header=True, header_style="bold", title=f"{result.structure} (n={result.n}, m={result.m:g})")
            table.add_column("epsilon", justify="right")
            table.add_column("cc", justify="right")
            table.add_column("delta_hat", justify="right")
            table.add_column("gcc", justify="right")
            table.add_column("d", justify="right")
            for row in result.rows:
                table.add_row(
                    f"{row.epsilon:.4g}",
                    f"{row.cc:.4f}",
                    f"{row.delta_hat:.4f}",
                    f"{row.gcc_fraction:.3f}",
                    f"{row.mean_distance:.3f}",
                )
            console.print(table)
        for path in outputs:
            console.print(f"[green]🛞 Wrote:[/green] [bold]{path}[/bold]")


@main.command(name="zoo-list")
@click.option("--json", "as_json", is_flag=True, help="Output as JSON")
def zoo_list_command(as_json: bool) -> None:
    """🔧 List the structures of the zoo and their parameters."""
    entries = [get_entry(name) for name in available_structures()]
    if as_json:
        click.echo(
            json.dumps(
                [{"name": e.name, "summary": e.summary, "params": list(e.params)} for e in entries],
                indent=2,
            )
        )
        return

    table = Table(show_header=True, header_style="bold")
    table.add_column("Structure", style="cyan")
    table.add_column("Description")
    table.add_column("Parameters", style="dim")
    for entry in entries:
        table.add_row(entry.name, entry.summary, ", ".join(entry.params) or "-")
    console.print(Panel(table, title="[bold]🛞 Structure zoo[/bold]", border_style="blue"))
    console.print("[dim]Also: custom (--costs), attribute (--positions + --affiliations)[/dim]")


if __name__ == "__main__":
    main()
