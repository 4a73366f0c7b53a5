"""Tests for the command-line interface."""

from __future__ import annotations

import csv
import json
import logging
import math
from pathlib import Path
from typing import TYPE_CHECKING

import pytest
from click.testing import CliRunner
from rich.logging import RichHandler

from rankgraph.cli import main
from rankgraph.errors import NumericError
from rankgraph.io import read_edge_list
from rankgraph.log import LOGGER_NAME, setup_logging, verbosity_level
from rankgraph.zoo import available_structures
from tests.conftest import write_csv

if TYPE_CHECKING:
    from rankgraph.sampler import Graph


@pytest.fixture
def runner() -> CliRunner:
    return CliRunner(env={"RANKGRAPH_SEED": None})


class TestGenerate:
    def test_zero_epsilon_edge_count(self, runner: CliRunner, tmp_path: Path) -> None:
        out = tmp_path / "nested.tsv"
        result = runner.invoke(main, ["generate", "-s", "nested", "-n", "128", "--m", "512", "-e", "0", "-o", str(out)])
        assert result.exit_code == 0, result.output
        graph = read_edge_list(out)
        assert graph.n == 128
        assert graph.edge_count == 512
        assert (tmp_path / "nested.manifest.json").exists()

    def test_reruns_are_byte_identical(self, runner: CliRunner, tmp_path: Path) -> None:
        args = ["generate", "-s", "spatial", "-n", "60", "--k", "6", "-e", "0.3", "--sample-seed", "9"]
        runner.invoke(main, [*args, "-o", str(tmp_path / "a.tsv")])
        runner.invoke(main, [*args, "-o", str(tmp_path / "b.tsv")])
        assert (tmp_path / "a.tsv").read_bytes() == (tmp_path / "b.tsv").read_bytes()

    def test_manifest_reproduces_run(self, runner: CliRunner, tmp_path: Path) -> None:
        first = tmp_path / "first.tsv"
        runner.invoke(main, ["generate", "-s", "star", "-n", "30", "--m", "40", "-e", "0.5", "-o", str(first)])
        second = tmp_path / "second.tsv"
        result = runner.invoke(
            main, ["generate", "-c", str(tmp_path / "first.manifest.json"), "-o", str(second)]
        )
        assert result.exit_code == 0, result.output
        assert read_edge_list(first).edge_set == read_edge_list(second).edge_set

    def test_batch_outputs(self, runner: CliRunner, tmp_path: Path) -> None:
        out = tmp_path / "g.tsv"
        result = runner.invoke(
            main,
            ["generate", "-s", "nested", "-n", "20", "--m", "30", "--count", "3", "--adjacency-pgm", "-o", str(out)],
        )
        assert result.exit_code == 0, result.output
        for i in range(3):
            assert (tmp_path / f"g-{i:03d}.tsv").exists()
            assert (tmp_path / f"g-{i:03d}.pgm").exists()
        manifest = json.loads((tmp_path / "g.manifest.json").read_text())
        assert len(manifest["outputs"]) == 6

    def test_failed_batch_writes_nothing(
        self, runner: CliRunner, tmp_path: Path, monkeypatch: pytest.MonkeyPatch
    ) -> None:
        calls: list[int] = []

        def fail_second(graph: Graph) -> bytes:
            calls.append(graph.n)
            if len(calls) == 2:
                raise NumericError("image failed")
            return b""

        monkeypatch.setattr("rankgraph.io.adjacency_pgm", fail_second)
        out = tmp_path / "g.tsv"
        result = runner.invoke(
            main, ["generate", "-n", "10", "--m", "5", "--count", "3", "--adjacency-pgm", "-o", str(out)]
        )
        assert result.exit_code == 3
        assert list(tmp_path.iterdir()) == []

    def test_env_seed(self, runner: CliRunner, tmp_path: Path) -> None:
        out = tmp_path / "g.tsv"
        runner.invoke(main, ["generate", "--m", "10", "-n", "10", "-o", str(out)], env={"RANKGRAPH_SEED": "5"})
        manifest = json.loads((tmp_path / "g.manifest.json").read_text())
        assert manifest["run"]["tie_seed"] == 5
        assert manifest["run"]["sample_seed"] == 5

    def test_positions_row_mismatch(self, runner: CliRunner, tmp_path: Path) -> None:
        positions = write_csv(tmp_path / "pos.csv", [[i / 10] for i in range(10)])
        result = runner.invoke(
            main,
            ["generate", "-s", "spatial", "-n", "12", "--m", "10", "--positions", str(positions), "-o", str(tmp_path / "g.tsv")],
        )
        assert result.exit_code == 2
        assert "10 rows" in result.output
        assert not (tmp_path / "g.tsv").exists()

    def test_unknown_structure(self, runner: CliRunner, tmp_path: Path) -> None:
        result = runner.invoke(main, ["generate", "-s", "galaxy", "--m", "5", "-o", str(tmp_path / "g.tsv")])
        assert result.exit_code == 2
        assert "galaxy" in result.output
        assert "nested" in result.output

    def test_missing_density(self, runner: CliRunner, tmp_path: Path) -> None:
        result = runner.invoke(main, ["generate", "-s", "nested", "-o", str(tmp_path / "g.tsv")])
        assert result.exit_code == 2

    def test_infeasible_density(self, runner: CliRunner, tmp_path: Path) -> None:
        result = runner.invoke(main, ["generate", "-n", "5", "--m", "11", "-o", str(tmp_path / "g.tsv")])
        assert result.exit_code == 2
        assert "m=11" in result.output

    def test_custom_costs(self, runner: CliRunner, tmp_path: Path) -> None:
        costs = write_csv(tmp_path / "c.csv", [[0, 1, 3.0], [0, 2, 1.0], [1, 2, 2.0]], header="u,v,cost")
        out = tmp_path / "g.tsv"
        result = runner.invoke(
            main, ["generate", "-s", "custom", "-n", "3", "--m", "1", "-e", "0", "--costs", str(costs), "-o", str(out)]
        )
        assert result.exit_code == 0, result.output
        assert read_edge_list(out).edge_set == {(0, 2)}

    def test_attribute_costs(self, runner: CliRunner, tmp_path: Path) -> None:
        positions = write_csv(tmp_path / "pos.csv", [[0.0], [0.1], [0.15], [0.3]])
        labels = write_csv(tmp_path / "aff.csv", [[0, 0], [1, 1], [2, 0], [3, 1]])
        out = tmp_path / "g.tsv"
        result = runner.invoke(
            main,
            [
                "generate", "-s", "attribute", "-n", "4", "--m", "2", "-e", "0",
                "--positions", str(positions), "--affiliations", str(labels), "--penalty", "10",
                "-o", str(out),
            ],
        )  # fmt: skip
        assert result.exit_code == 0, result.output
        assert read_edge_list(out).edge_set == {(0, 2), (1, 3)}


class TestRankMatrix:
    def test_csv(self, runner: CliRunner, tmp_path: Path) -> None:
        out = tmp_path / "nested.csv"
        result = runner.invoke(main, ["rank-matrix", "-s", "nested", "-n", "4", "--format", "csv", "-o", str(out)])
        assert result.exit_code == 0, result.output
        rows = list(csv.reader(out.read_text().splitlines()))
        assert [rows[i][i] for i in range(4)] == ["", "", "", ""]
        values = {int(cell) for row in rows for cell in row if cell}
        assert values == set(range(1, 7))
        assert rows[0][1] == "1"

    def test_probabilities(self, runner: CliRunner, tmp_path: Path) -> None:
        out = tmp_path / "star.pgm"
        result = runner.invoke(main, ["rank-matrix", "-s", "star", "-n", "8", "--m", "10", "--probabilities", "-o", str(out)])
        assert result.exit_code == 0, result.output
        assert (tmp_path / "star.probabilities.pgm").read_bytes().startswith(b"P5\n8 8\n255\n")

    def test_gallery(self, runner: CliRunner, tmp_path: Path) -> None:
        directory = tmp_path / "gallery"
        result = runner.invoke(main, ["rank-matrix", "--all", "-n", "32", "-o", str(directory)])
        assert result.exit_code == 0, result.output
        written = sorted(p.stem for p in directory.glob("*.pgm"))
        assert written == sorted(available_structures())
        assert (directory / "manifest.json").exists()


class TestProbCurve:
    def test_curves_sum_to_m(self, runner: CliRunner, tmp_path: Path) -> None:
        directory = tmp_path / "curves"
        result = runner.invoke(
            main, ["prob-curve", "-n", "20", "--m", "10", "-e", "0", "-e", "0.5", "-e", "1", "-o", str(directory)]
        )
        assert result.exit_code == 0, result.output
        totals: dict[float, list[float]] = {}
        with (directory / "probabilities.csv").open() as f:
            for row in csv.DictReader(f):
                totals.setdefault(float(row["epsilon"]), []).append(float(row["p"]))
        assert sorted(totals) == [0.0, 0.5, 1.0]
        for values in totals.values():
            assert len(values) == 190
            assert math.isclose(math.fsum(values), 10.0, rel_tol=1e-9)
        assert (directory / "cumulative.csv").exists()

    def test_bad_epsilon(self, runner: CliRunner, tmp_path: Path) -> None:
        result = runner.invoke(main, ["prob-curve", "-n", "20", "-e", "1.5", "-o", str(tmp_path)])
        assert result.exit_code == 2
        assert "epsilon" in result.output


class TestSmallworld:
    def test_help_points_to_ring_variant(self, runner: CliRunner) -> None:
        result = runner.invoke(main, ["smallworld", "--help"])
        assert result.exit_code == 0
        assert "variant=ring" in result.output

    def test_single_structure(self, runner: CliRunner, tmp_path: Path) -> None:
        directory = tmp_path / "sw"
        result = runner.invoke(
            main,
            [
                "smallworld", "-n", "40", "--k", "4", "-p", "variant=ring",
                "-e", "0", "-e", "1", "--runs", "2", "-o", str(directory),
            ],
        )  # fmt: skip
        assert result.exit_code == 0, result.output
        with (directory / "watts_strogatz.csv").open() as f:
            rows = list(csv.DictReader(f))
        assert [float(r["epsilon"]) for r in rows] == [0.0, 1.0]
        assert float(rows[0]["cc_mean"]) == pytest.approx(0.5)
        assert rows[0]["runs"] == "2"

    def test_zoo(self, runner: CliRunner, tmp_path: Path) -> None:
        directory = tmp_path / "sw"
        result = runner.invoke(
            main, ["smallworld", "--zoo", "-n", "24", "--m", "60", "-e", "0", "--runs", "1", "-o", str(directory)]
        )
        assert result.exit_code == 0, result.output
        assert len(list(directory.glob("*.csv"))) == len(available_structures())


class TestZooList:
    def test_json(self, runner: CliRunner) -> None:
        result = runner.invoke(main, ["zoo-list", "--json"])
        assert result.exit_code == 0
        entries = json.loads(result.output)
        assert [e["name"] for e in entries] == available_structures()
        perlin = next(e for e in entries if e["name"] == "perlin")
        assert perlin["params"] == ["octaves", "frequency"]

    def test_table(self, runner: CliRunner) -> None:
        result = runner.invoke(main, ["zoo-list"])
        assert result.exit_code == 0
        assert "erdos_renyi" in result.output

    def test_version(self, runner: CliRunner) -> None:
        result = runner.invoke(main, ["--version"])
        assert result.exit_code == 0
        assert "version" in result.output


class TestLogging:
    @pytest.mark.parametrize(
        ("verbose", "quiet", "level"),
        [(0, False, logging.WARNING), (1, False, logging.INFO), (2, False, logging.DEBUG), (3, True, logging.ERROR)],
    )
    def test_verbosity_level(self, verbose: int, quiet: bool, level: int) -> None:
        assert verbosity_level(verbose, quiet) == level

    def test_single_handler(self) -> None:
        setup_logging(logging.INFO)
        logger = setup_logging(logging.DEBUG)
        assert logger.name == LOGGER_NAME
        assert sum(isinstance(h, RichHandler) for h in logger.handlers) == 1
        assert logger.level == logging.DEBUG
        assert not logger.propagate


class TestManifestRerun:
    """Re-running a command from its manifest writes the same files."""

    def _rerun(self, runner: CliRunner, command: str, manifest: Path, output: Path) -> None:
        result = runner.invoke(main, [command, "-c", str(manifest), "-o", str(output)])
        assert result.exit_code == 0, result.output

    def test_generate_flags(self, runner: CliRunner, tmp_path: Path) -> None:
        args = ["generate", "-s", "star", "-n", "12", "--m", "15", "--count", "2", "--adjacency-pgm"]
        runner.invoke(main, [*args, "-o", str(tmp_path / "a" / "g.tsv")])
        self._rerun(runner, "generate", tmp_path / "a" / "g.manifest.json", tmp_path / "b" / "g.tsv")
        for name in ("g-000.tsv", "g-001.tsv", "g-000.pgm", "g-001.pgm"):
            assert (tmp_path / "a" / name).read_bytes() == (tmp_path / "b" / name).read_bytes()

    def test_rank_matrix_flags(self, runner: CliRunner, tmp_path: Path) -> None:
        args = ["rank-matrix", "--all", "-n", "32", "--format", "csv", "--probabilities", "--natural-order"]
        runner.invoke(main, [*args, "-o", str(tmp_path / "a")])
        self._rerun(runner, "rank-matrix", tmp_path / "a" / "manifest.json", tmp_path / "b")
        first = sorted(p.name for p in (tmp_path / "a").glob("*.csv"))
        assert len(first) == 2 * len(available_structures())
        assert sorted(p.name for p in (tmp_path / "b").glob("*.csv")) == first
        for name in first:
            assert (tmp_path / "a" / name).read_bytes() == (tmp_path / "b" / name).read_bytes()
        assert not list((tmp_path / "b").glob("*.pgm"))

    def test_prob_curve_samples(self, runner: CliRunner, tmp_path: Path) -> None:
        runner.invoke(main, ["prob-curve", "-n", "10", "--m", "5", "-e", "0.3", "--samples", "5", "-o", str(tmp_path / "a")])
        self._rerun(runner, "prob-curve", tmp_path / "a" / "manifest.json", tmp_path / "b")
        second = (tmp_path / "b" / "cumulative.csv").read_text()
        assert len(second.splitlines()) == 1 + 5
        assert (tmp_path / "a" / "cumulative.csv").read_text() == second

    def test_smallworld_zoo(self, runner: CliRunner, tmp_path: Path) -> None:
        args = ["smallworld", "--zoo", "-n", "24", "--m", "60", "-e", "0", "--runs", "1"]
        runner.invoke(main, [*args, "-o", str(tmp_path / "a")])
        self._rerun(runner, "smallworld", tmp_path / "a" / "manifest.json", tmp_path / "b")
        first = sorted(p.name for p in (tmp_path / "a").glob("*.csv"))
        assert len(first) == len(available_structures())
        assert sorted(p.name for p in (tmp_path / "b").glob("*.csv")) == first
        for name in first:
            assert (tmp_path / "a" / name).read_bytes() == (tmp_path / "b" / name).read_bytes()
