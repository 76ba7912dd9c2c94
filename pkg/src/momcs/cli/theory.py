"""
The lemma check suite: every configured check on every configured measurement/noise pair, optionally with
a gamma calibration and a batch-size sweep, written to one CSV.
"""
import logging
from pathlib import Path
from typing import Any, Dict, List, Mapping, Optional, Union

from pydantic import BaseModel, Extra, Field, validator
from rich.console import Console
from rich.table import Table

from momcs.sensing import Ensemble, NoiseSpec, coerce_ensemble
from momcs.theory_lab import CHECKS, CalibrationError, CheckName, LemmaCheckConfig, LemmaCheckReport, calibrate_gamma, sweep_batch_size

from .config_file import load_sections
from .output import write_csv

logger = logging.getLogger(__name__)


class LemmaScenario(BaseModel):
    """A measurement ensemble paired with a noise model."""

    ensemble: Ensemble = Field(default_factory=Ensemble.gaussian)
    noise: NoiseSpec = Field(default_factory=NoiseSpec)

    class Config:
        extra = Extra.forbid

    _coerce_ensemble = validator("ensemble", pre=True, allow_reuse=True)(coerce_ensemble)

    @property
    def tag(self) -> str:
        return f"{self.ensemble.tag}/{self.noise.tag}"


def _default_scenarios() -> List[LemmaScenario]:
    return [
        LemmaScenario(),
        LemmaScenario(ensemble=Ensemble.student_t(4), noise=NoiseSpec(distribution=Ensemble.student_t(3), sigma=1.0)),
    ]


class TheorySuiteConfig(BaseModel):
    """
    Attributes:
        base: dims and constants shared by every check; ensemble and noise come from the scenarios
        scenarios: measurement/noise pairs every check runs on
        checks: checks to run
        gamma_grid: when set, the restricted eigenvalue check also calibrates gamma over this grid
        batch_size_grid: when set, every check also reports the smallest passing batch size of this grid
        output: output directory
    """

    base: LemmaCheckConfig = Field(default_factory=lambda: LemmaCheckConfig(trials=100, n=50, batches=50, direction_samples=50))
    scenarios: List[LemmaScenario] = Field(default_factory=_default_scenarios)
    checks: List[CheckName] = Field(default_factory=lambda: list(CheckName))
    gamma_grid: Optional[List[float]] = None
    batch_size_grid: Optional[List[int]] = None
    output: Path = Path("theory")

    class Config:
        extra = Extra.forbid


def _row(report: LemmaCheckReport, scenario: LemmaScenario, mode: str) -> Dict[str, Any]:
    return {"scenario": scenario.tag, "mode": mode, **report.row(), "passed": report.passed}


def run_suite(config: TheorySuiteConfig) -> List[Dict[str, Any]]:
    """
    Run the suite.
    Returns:
        One row per report, with a `passed` flag. A failed calibration is reported as a failed row.
    """
    rows = []
    for scenario in config.scenarios:
        base = config.base.with_updates(ensemble=scenario.ensemble, noise=scenario.noise)
        for check in config.checks:
            rows.append(_row(CHECKS[check](base), scenario, "fixed"))
            if config.gamma_grid and check == CheckName.batch_srec:
                try:
                    rows.append(_row(calibrate_gamma(base, config.gamma_grid), scenario, "gamma_sweep"))
                except CalibrationError as error:
                    logger.error("%s on %s: %s", check.value, scenario.tag, error)
                    rows.append({"scenario": scenario.tag, "mode": "gamma_sweep", "check": check.value, "passed": False})
            if config.batch_size_grid:
                try:
                    _, report = sweep_batch_size(base, config.batch_size_grid, check)
                    rows.append(_row(report, scenario, "batch_size_sweep"))
                except CalibrationError as error:
                    logger.error("%s on %s: %s", check.value, scenario.tag, error)
                    rows.append({"scenario": scenario.tag, "mode": "batch_size_sweep", "check": check.value, "passed": False})
    return rows


def _columns(rows: List[Dict[str, Any]]) -> List[str]:
    columns: List[str] = []
    for row in rows:
        columns.extend(key for key in row if key not in columns)
    return columns


def run_theory_suite(
    config_path: Optional[Union[str, Path]],
    overrides: Optional[Mapping[str, Mapping[str, Any]]] = None,
    console: Optional[Console] = None,
    seed: Optional[int] = None,
) -> int:
    """
    Load a suite config, run it and write `theory.csv` to its output directory.
    Args:
        config_path: YAML file with a `theory` section, None for defaults
        overrides: field overrides per section
        console: console for the summary table
        seed: replaces the seed of the base check configuration

    Returns:
        0 when every check met its pass target, 1 otherwise.

    Raises:
        ConfigError: for a malformed config
    """
    config = load_sections(config_path, {"theory": TheorySuiteConfig}, overrides)["theory"]
    if seed is not None:
        config.base = config.base.with_updates(seed=seed)
    rows = run_suite(config)
    write_csv(config.output / "theory.csv", _columns(rows), rows, config.base.seed)

    table = Table(title="Lemma checks")
    for column in ("scenario", "check", "mode", "pass_rate", "passed"):
        table.add_column(column)
    for row in rows:
        table.add_row(row["scenario"], row["check"], row["mode"], f"{row.get('pass_rate', float('nan')):.3f}", str(row["passed"]))
    (console or Console()).print(table)
    return 0 if all(row["passed"] for row in rows) else 1
