from nc_concentration.src.cli.commands import COMMANDS, CommandResult, fit_constant
from nc_concentration.src.cli.main import args_to_config, build_parser, main
from nc_concentration.src.cli.runner import dispatch, render_report, report_json_schema, write_report

__all__ = [
    "COMMANDS",
    "CommandResult",
    "args_to_config",
    "build_parser",
    "dispatch",
    "fit_constant",
    "main",
    "render_report",
    "report_json_schema",
    "write_report",
]
