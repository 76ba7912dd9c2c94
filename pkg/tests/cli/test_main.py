import io

import pytest
from rich.console import Console

from momcs.cli.main import build_parser, main
from momcs.cli.output import read_csv
from momcs.core.binary import read_array
from momcs.generator import load_weights
from momcs.sensing import load_problem

GENERATOR = ["--generator-dims", "[2, 8, 16]", "--generator-seed", "1"]


def run(*argv):
    return main([str(arg) for arg in argv], console=Console(file=io.StringIO()))


def test_gen(tmp_path):
    assert run("gen", "--out", tmp_path, *GENERATOR) == 0
    assert load_weights(tmp_path / "generator.gnw").layer_dims == (2, 8, 16)


def test_synth_then_recover(tmp_path):
    assert run("synth", "--out", tmp_path, *GENERATOR, "--problem-m", 40, "--problem-validation-size", 10, "--seed", 5) == 0
    problem = load_problem(tmp_path / "problem")
    assert (problem.m, problem.n) == (30, 16)
    assert load_problem(tmp_path / "validation").m == 10

    status = run(
        "recover",
        "--problem", tmp_path / "problem",
        "--validation", tmp_path / "validation",
        "--generator-weights", tmp_path / "generator.gnw",
        "--recovery-algorithm", "mom_direct",
        "--recovery-batches", 5,
        "--recovery-iterations", 15,
        "--recovery-restarts", 2,
        "--recovery-validation-batches", 2,
        "--trace",
        "--dump",
        "--out", tmp_path,
    )
    assert status == 0
    assert len(read_csv(tmp_path / "trace.csv")) == 15
    assert read_array(tmp_path / "reconstruction.bin").shape == (16,)


def test_recover_with_batch_grid(tmp_path):
    status = run(
        "recover",
        *GENERATOR,
        "--problem-m", 48,
        "--problem-validation-size", 8,
        "--recovery-algorithm", "mom_tournament",
        "--recovery-iterations", 10,
        "--recovery-restarts", 1,
        "--recovery-validation-batches", 2,
        "--batch-grid", 1, 4, 8,
        "--out", tmp_path,
    )
    assert status == 0


def test_batch_grid_needs_validation(tmp_path):
    assert run("recover", *GENERATOR, "--problem-m", 40, "--recovery-iterations", 5, "--batch-grid", 2) == 2


def test_bench(tmp_path):
    config = tmp_path / "bench.yaml"
    config.write_text(
        "plan:\n"
        "  scenario: heavy_tailed\n"
        "  generator: {dims: [2, 8, 16], seed: 1}\n"
        "  m_grid: [20, 40]\n"
        "  trials: 2\n"
        "  algorithms:\n"
        "    - {algorithm: erm, iterations: 10, restarts: 1}\n"
        "    - {algorithm: mom_tournament, batches: 4, iterations: 10, restarts: 1}\n"
    )
    assert run("bench", "--config", config, "--out", tmp_path / "out", "--seed", 3, "--threads", 2) == 0
    rows = read_csv(tmp_path / "out" / "results.csv")
    assert len(rows) == 8
    assert (tmp_path / "out" / "results.csv").read_text().startswith("# master_seed=3 ")
    assert len(read_csv(tmp_path / "out" / "summary.csv")) == 4


def test_bench_is_reproducible(tmp_path):
    config = tmp_path / "bench.yaml"
    config.write_text(
        "plan:\n  generator: {dims: [2, 8, 16]}\n  m_grid: [20]\n  trials: 2\n"
        "  algorithms: [{algorithm: erm, iterations: 5, restarts: 1}]\n"
    )
    tables = []
    for name in ("a", "b"):
        assert run("bench", "--config", config, "--out", tmp_path / name) == 0
        tables.append([{k: v for k, v in row.items() if k != "wall_ms"} for row in read_csv(tmp_path / name / "results.csv")])
    assert tables[0] == tables[1]


def test_theory(tmp_path):
    config = tmp_path / "theory.yaml"
    config.write_text(
        "theory:\n"
        "  base: {trials: 5, n: 10, k: 2, hidden_dims: [6], batches: 10, batch_size: 4, direction_samples: 5}\n"
        "  scenarios:\n"
        "    - {ensemble: gaussian, noise: {sigma: 0.0}}\n"
        "  checks: [objective_bound]\n"
    )
    assert run("theory", "--config", config, "--out", tmp_path, "--seed", 4) == 0
    rows = read_csv(tmp_path / "theory.csv")
    assert len(rows) == 1
    assert (rows[0]["check"], rows[0]["pass_rate"], rows[0]["passed"], rows[0]["seed"]) == ("objective_bound", "1.0", "true", "4")


def test_malformed_config_exits_with_an_error(tmp_path):
    config = tmp_path / "bad.yaml"
    config.write_text("recovery:\n  bogus: 1\n")
    console = Console(file=io.StringIO())
    assert main(["recover", "--config", str(config)], console=console) == 2
    assert "recovery.bogus" in console.file.getvalue()


def test_parser_requires_a_command():
    with pytest.raises(SystemExit):
        build_parser().parse_args([])
