"""
Command line interface: `momcs gen|synth|recover|bench|theory`.
"""
import argparse
import logging
from pathlib import Path
from typing import Dict, List, Optional, Sequence, Type

from pydantic import BaseModel
from rich.console import Console
from rich.logging import RichHandler
from rich.table import Table

from momcs import __version__
from momcs.core.binary import write_array
from momcs.core.core_settings import LOG_LEVEL, THREADS
from momcs.core.errors import MomcsError
from momcs.generator import save_weights
from momcs.middleware import LoggingMiddleware
from momcs.recovery import RecoveryConfig, RecoveryReport, recover, select_batch_count
from momcs.sensing import load_problem, save_problem

from .config_file import ConfigError, add_override_flags, collect_overrides, load_sections
from .output import emit_trace, write_results, write_summary
from .plan import ExperimentPlan, run_plan, summarize
from .settings import GeneratorSource, ProblemSettings
from .theory import TheorySuiteConfig, run_theory_suite

logger = logging.getLogger(__name__)

SECTIONS: Dict[str, Dict[str, Type[BaseModel]]] = {
    "gen": {"generator": GeneratorSource},
    "synth": {"generator": GeneratorSource, "problem": ProblemSettings},
    "recover": {"generator": GeneratorSource, "problem": ProblemSettings, "recovery": RecoveryConfig},
    "bench": {"plan": ExperimentPlan},
    "theory": {"theory": TheorySuiteConfig},
}
"Configuration sections read by each command."

WEIGHTS_FILE = "generator.gnw"


def configure_logging(level: str) -> None:
    logging.basicConfig(level=level.upper(), format="%(message)s", datefmt="[%X]", handlers=[RichHandler(rich_tracebacks=True)], force=True)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="momcs", description="Robust compressed sensing with generative priors.")
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    commands = parser.add_subparsers(dest="command", required=True)
    helps = {
        "gen": "create and save a random generator",
        "synth": "synthesize and save a sensing problem",
        "recover": "recover a single problem",
        "bench": "run an experiment plan",
        "theory": "run the lemma check suite",
    }
    for command, sections in SECTIONS.items():
        sub = commands.add_parser(command, help=helps[command])
        sub.add_argument("--config", type=Path, help="YAML config file")
        sub.add_argument("--seed", type=int, help="master seed, overriding the config")
        sub.add_argument("--out", type=Path, help="output directory")
        sub.add_argument("--threads", type=int, default=THREADS, help="worker count")
        sub.add_argument("--log-level", default=LOG_LEVEL, help="logging level")
        if command == "recover":
            sub.add_argument("--problem", type=Path, help="load a saved problem instead of synthesizing one")
            sub.add_argument("--validation", type=Path, help="load saved validation measurements")
            sub.add_argument("--batch-grid", type=int, nargs="+", help="select the batch count on validation measurements")
            sub.add_argument("--trace", action="store_true", help="write trace.csv")
            sub.add_argument("--dump", action="store_true", help="write the raw reconstruction to reconstruction.bin")
        for section, model in sections.items():
            add_override_flags(sub, section, model)
    return parser


def _seeded(args: argparse.Namespace) -> Dict[str, Dict[str, object]]:
    overrides = collect_overrides(args)
    if args.seed is not None:
        seed_fields = {
            "gen": [("generator", "seed")],
            "synth": [("problem", "seed")],
            "recover": [("problem", "seed"), ("recovery", "seed")],
            "bench": [("plan", "master_seed")],
        }
        for section, name in seed_fields.get(args.command, []):
            overrides.setdefault(section, {})[name] = args.seed
    if args.out is not None:
        if args.command == "bench":
            overrides.setdefault("plan", {})["output"] = args.out
        if args.command == "theory":
            overrides.setdefault("theory", {})["output"] = args.out
    return overrides


def _report_table(report: RecoveryReport) -> Table:
    table = Table(title=f"Recovery: {report.algorithm}")
    table.add_column("field")
    table.add_column("value")
    for name in ("final_objective", "recon_error_per_pixel", "iterations", "restart_index_chosen", "wall_time", "validation_score"):
        table.add_row(name, str(getattr(report, name)))
    return table


def _gen(args, sections, console) -> int:
    net = sections["generator"].build()
    out = args.out or Path(".")
    out.mkdir(parents=True, exist_ok=True)
    save_weights(net, out / WEIGHTS_FILE)
    console.print(f"Saved generator {list(net.layer_dims)} to {out / WEIGHTS_FILE}")
    return 0


def _synth(args, sections, console) -> int:
    net = sections["generator"].build()
    problem, validation = sections["problem"].build(net)
    out = args.out or Path(".")
    save_problem(problem, out / "problem")
    if validation is not None:
        save_problem(validation, out / "validation")
    save_weights(net, out / WEIGHTS_FILE)
    console.print(f"Saved problem m={problem.m} n={problem.n} ({len(problem.corrupted_rows)} corrupted rows) to {out}")
    return 0


def _recover(args, sections, console) -> int:
    net = sections["generator"].build()
    if args.problem is not None:
        problem = load_problem(args.problem)
        validation = load_problem(args.validation) if args.validation is not None else None
    else:
        problem, validation = sections["problem"].build(net)
    config: RecoveryConfig = sections["recovery"]
    if args.batch_grid:
        if validation is None:
            raise ConfigError("--batch-grid needs validation measurements (problem.validation_size or --validation)")
        batches, reports = select_batch_count(problem, net, config, args.batch_grid, validation)
        console.print(f"Selected M={batches} from {sorted(reports)}")
        report = reports[batches]
    else:
        report = recover(problem, net, config, validation=validation, middlewares=[LoggingMiddleware])
    console.print(_report_table(report))
    out = args.out or Path(".")
    if args.trace:
        emit_trace(report, out / "trace.csv")
    if args.dump:
        out.mkdir(parents=True, exist_ok=True)
        write_array(out / "reconstruction.bin", report.reconstruction)
    return 0


def _bench(args, sections, console) -> int:
    plan: ExperimentPlan = sections["plan"]
    rows = run_plan(plan, threads=args.threads, show_progress=True)
    summary = summarize(rows)
    write_results(rows, plan.output / "results.csv", plan.master_seed)
    write_summary(summary, plan.output / "summary.csv", plan.master_seed)

    table = Table(title=f"Benchmark: {plan.scenario.value}")
    for column in ("m", "algorithm", "trials", "diverged", "mean error", "95% CI"):
        table.add_column(column)
    for row in summary:
        table.add_row(str(row.m), row.algorithm, str(row.trials), str(row.diverged), f"{row.mean_recon_error:.4g}", f"±{row.ci95:.2g}")
    console.print(table)
    return 0


COMMANDS = {"gen": _gen, "synth": _synth, "recover": _recover, "bench": _bench}


def main(argv: Optional[Sequence[str]] = None, console: Optional[Console] = None) -> int:
    """
    Entry point of the `momcs` command.
    Returns:
        The exit status: 0 on success, 1 when a lemma check failed, 2 on errors.
    """
    args = build_parser().parse_args(argv)
    configure_logging(args.log_level)
    console = console or Console()
    overrides = _seeded(args)
    try:
        if args.command == "theory":
            return run_theory_suite(args.config, overrides, console, seed=args.seed)
        sections = load_sections(args.config, SECTIONS[args.command], overrides)
        return COMMANDS[args.command](args, sections, console)
    except MomcsError as error:
        logger.error("%s", error)
        console.print(f"[red]error:[/red] {error}")
        return 2
