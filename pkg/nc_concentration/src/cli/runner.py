"""Route a RunConfig to its handler and wrap the outcome in a RunReport."""
from __future__ import annotations

import time
from pathlib import Path
from typing import Any

from nc_concentration import __version__
from nc_concentration.logger import GLOBAL_LOGGER as log
from nc_concentration.exception.custom_exception import UsageError
from nc_concentration.model.models import RunConfig, RunReport
from nc_concentration.src.cli.commands import COMMANDS, Params
from nc_concentration.utils.config_loader import get_settings
from nc_concentration.utils.file_io import dumps_report, records_frame, to_jsonable, write_csv, write_json


def dispatch(config: RunConfig) -> RunReport:
    """Run one subcommand. ``pass`` is the conjunction of the handler's checks."""
    command = COMMANDS.get(config.subcommand)
    if command is None:
        raise UsageError(f"Unknown subcommand {config.subcommand!r}; expected one of {sorted(COMMANDS)}")
    unknown = sorted(set(config.params) - command.keys)
    if unknown:
        raise UsageError(f"Unknown parameters for '{config.subcommand}': {unknown}")

    log.info("Dispatching", subcommand=config.subcommand, seed=config.seed)
    start = time.perf_counter()
    result = command.handler(Params(config.subcommand, config.params), config.seed)
    elapsed = int(round((time.perf_counter() - start) * 1000.0))

    report = RunReport(
        schema_version=get_settings().report.schema_version,
        version=__version__,
        config=config,
        records=to_jsonable(result.records),
        passed=bool(result.passed),
        summary=to_jsonable(result.summary),
        wall_time_ms=elapsed,
    )
    log.info("Run finished", subcommand=config.subcommand, passed=report.passed,
             records=len(report.records), wall_time_ms=elapsed)
    return report


def report_dict(report: RunReport) -> dict[str, Any]:
    return to_jsonable(report.model_dump(mode="json", by_alias=True))


def render_report(report: RunReport) -> str:
    if report.config.format == "csv":
        return records_frame(report.records).to_csv(index=False)
    return dumps_report(report_dict(report))


def write_report(report: RunReport, path: str | Path) -> Path:
    if report.config.format == "csv":
        return write_csv(report.records, path)
    return write_json(report_dict(report), path)


def report_json_schema() -> dict[str, Any]:
    """JSON schema of the run report, tagged with the pinned schema version."""
    schema = RunReport.model_json_schema(by_alias=True)
    schema["$comment"] = f"schema_version {get_settings().report.schema_version}"
    return schema
