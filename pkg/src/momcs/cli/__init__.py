from .config_file import ConfigError, add_override_flags, collect_overrides, load_sections
from .plan import BenchRow, ExperimentPlan, PlanError, Scenario, SummaryRow, run_plan, summarize
from .settings import GeneratorSource, ProblemSettings, draw_problem
