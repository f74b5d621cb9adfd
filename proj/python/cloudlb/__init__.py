"""Cloud datacenter load-balancing simulator (baseline vs. migrating Cloud Manager)."""

from pathlib import Path

from ._core import (
    EngineAbort,
    ScenarioError,
    Scenario,
    RunReport,
    baseline_select,
    compare,
    compute_status,
    improvement_pct,
    parse_scenario,
    remaining_duration,
    run,
    service_duration,
    __version__,
)


def load_scenario(path):
    """Parse a scenario file from disk."""
    return parse_scenario(Path(path).read_text(encoding="utf-8"))


__all__ = [
    "EngineAbort",
    "ScenarioError",
    "Scenario",
    "RunReport",
    "baseline_select",
    "compare",
    "compute_status",
    "improvement_pct",
    "load_scenario",
    "parse_scenario",
    "remaining_duration",
    "run",
    "service_duration",
    "__version__",
]
