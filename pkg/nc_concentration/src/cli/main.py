"""Command-line entry point: ``nc-concentration <group> <action> [flags]``.

Exit status: 0 when the run passes (or completes, for evaluations), 1 on a failed
check or a library error, 2 on bad usage.
"""
from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path
from typing import Any, Optional, Sequence

from pydantic import ValidationError

from nc_concentration import __version__
from nc_concentration.logger import GLOBAL_LOGGER as log
from nc_concentration.exception.custom_exception import ConcentrationError, UsageError
from nc_concentration.model.models import RunConfig
from nc_concentration.src.cli.commands import COMMANDS
from nc_concentration.src.cli.runner import dispatch, render_report, write_report
from nc_concentration.utils.file_io import dumps_report, to_jsonable

_GLOBAL_DESTS = {"group", "action", "config", "out", "format", "seed"}


class _Parser(argparse.ArgumentParser):
    def error(self, message: str):
        raise UsageError(message)


def _add_common(p: argparse.ArgumentParser) -> None:
    p.add_argument("--seed", type=int, default=None, help="Unsigned 64-bit seed (required for Monte Carlo runs).")
    p.add_argument("--config", default=None, help="Experiment JSON whose keys become parameters.")
    p.add_argument("--out", default=None, help="Write the report here instead of stdout.")
    p.add_argument("--format", choices=("json", "csv"), default=None)


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="nc-concentration", description="Noncommutative concentration bounds and experiments.")
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    groups = parser.add_subparsers(dest="group", required=True, parser_class=_Parser)

    bounds = groups.add_parser("bounds").add_subparsers(dest="action", required=True, parser_class=_Parser)
    p = bounds.add_parser("eval", help="Closed-form tail and moment bounds.")
    p.add_argument("--kind", choices=("all", "bennett", "bernstein", "prohorov", "rosenthal",
                                      "cs-moment", "cs-tail", "incomplete-gamma"))
    p.add_argument("--S", type=float)
    p.add_argument("--R", type=float)
    p.add_argument("--t", type=float, nargs="+")
    p.add_argument("--p", type=float, nargs="+")
    p.add_argument("--sharp", action="store_true", default=None)
    p.add_argument("--m", type=int)
    p.add_argument("--k", type=float)
    p.add_argument("--r", type=float)
    p.add_argument("--eps", type=float)
    p.add_argument("--alpha", type=float)
    p.add_argument("--C", type=float)
    _add_common(p)

    mc = groups.add_parser("mc").add_subparsers(dest="action", required=True, parser_class=_Parser)
    for action, grid_flag in (("tail", "--t-grid"), ("rosenthal", "--p-list"), ("dominance", "--t-grid")):
        p = mc.add_parser(action)
        p.add_argument("--spec", help="Built-in ensemble name such as rademacher-d1-n10.")
        p.add_argument(grid_flag, type=float, nargs="+")
        p.add_argument("--trials", type=int)
        p.add_argument("--confidence", type=float)
        _add_common(p)

    opt = groups.add_parser("opt").add_subparsers(dest="action", required=True, parser_class=_Parser)
    p = opt.add_parser("selector", help="Lower bound on f(p), or the exact selector moment with --m.")
    p.add_argument("--p", type=float, nargs="+")
    p.add_argument("--C", type=float)
    p.add_argument("--variant", choices=("fixed-gamma", "optimized-gamma"))
    p.add_argument("--m", type=int)
    p.add_argument("--lam", type=float)
    p.add_argument("--k", type=float)
    _add_common(p)
    p = opt.add_parser("gaussian")
    p.add_argument("--p", type=float, nargs="+")
    _add_common(p)

    cs = groups.add_parser("cs").add_subparsers(dest="action", required=True, parser_class=_Parser)
    p = cs.add_parser("rip")
    p.add_argument("--n", type=int)
    p.add_argument("--s", type=int)
    p.add_argument("--omega", type=int, nargs="+")
    p.add_argument("--k", type=float, help="Draw a Bernoulli(k/n) row set from the seed.")
    p.add_argument("--trials", type=int, help="Independent row-set draws, one record each.")
    method = p.add_mutually_exclusive_group()
    method.add_argument("--exact", action="store_true", default=None, help="Enumerate every support (the default).")
    method.add_argument("--supports", "--num-supports", dest="num_supports", type=int,
                        help="Sample this many supports instead; gives a lower estimate.")
    p.add_argument("--gate", action="store_true", default=None)
    _add_common(p)
    p = cs.add_parser("recover")
    p.add_argument("--n", type=int)
    p.add_argument("--s", type=int)
    p.add_argument("--k", type=float, nargs="+")
    p.add_argument("--trials", type=int)
    p.add_argument("--amp-law", choices=("unit", "complex-gaussian"))
    p.add_argument("--confidence", type=float)
    _add_common(p)
    p = cs.add_parser("tail")
    p.add_argument("--n", type=int)
    p.add_argument("--k", type=float)
    p.add_argument("--s", type=int)
    p.add_argument("--T", type=int, nargs="+")
    p.add_argument("--teps", "--t-eps", dest="t_eps", type=float, nargs="+")
    p.add_argument("--trials", type=int)
    p.add_argument("--C", type=float)
    p.add_argument("--confidence", type=float)
    p.add_argument("--fit", action="store_true", default=None)
    _add_common(p)

    ldp = groups.add_parser("ldp").add_subparsers(dest="action", required=True, parser_class=_Parser)
    p = ldp.add_parser("eval")
    p.add_argument("--law", help="gauss, semicircle[:a,r] or mixture:theta")
    p.add_argument("--what", choices=("mgf", "logmgf", "rate", "upper", "sf", "moment", "curve"))
    p.add_argument("--x", type=float, nargs="+")
    p.add_argument("--lam", type=float, nargs="+")
    p.add_argument("--order", type=int, nargs="+")
    p.add_argument("--lam-lo", type=float)
    p.add_argument("--lam-hi", type=float)
    p.add_argument("--grid-n", type=int)
    _add_common(p)
    return parser


def _read_experiment(path: str) -> dict[str, Any]:
    try:
        data = json.loads(Path(path).read_text(encoding="utf-8"))
    except (OSError, json.JSONDecodeError) as e:
        raise UsageError(f"Cannot read experiment config {path}", e) from e
    if not isinstance(data, dict):
        raise UsageError(f"Experiment config {path} must hold a JSON object")
    return data


def args_to_config(ns: argparse.Namespace) -> RunConfig:
    """Merge an experiment file (if any) with the flags; explicit flags win."""
    subcommand = f"{ns.group} {ns.action}"
    params: dict[str, Any] = _read_experiment(ns.config) if ns.config else {}
    seed = params.pop("seed", None)
    fmt = params.pop("format", None)
    out = params.pop("out_path", None)
    for key, value in vars(ns).items():
        if key not in _GLOBAL_DESTS and value is not None:
            params[key] = value
    seed = ns.seed if ns.seed is not None else seed
    if seed is None:
        if COMMANDS[subcommand].needs_seed(params):
            raise UsageError(f"'{subcommand}' draws random numbers and needs --seed")
        seed = 0
    try:
        return RunConfig(subcommand=subcommand, params=params, seed=seed,
                         out_path=ns.out or out, format=ns.format or fmt or "json")
    except ValidationError as e:
        raise UsageError(f"Invalid run configuration: {e}", e) from e


def _print_error(err: ConcentrationError, config: Optional[RunConfig]) -> None:
    record: dict[str, Any] = {"error": err.to_record()}
    if config is not None:
        record["config"] = config.model_dump(mode="json")
    sys.stdout.write(dumps_report(to_jsonable(record)))


def main(argv: Optional[Sequence[str]] = None) -> int:
    config: Optional[RunConfig] = None
    try:
        ns = build_parser().parse_args(argv)
        config = args_to_config(ns)
        report = dispatch(config)
        if config.out_path:
            write_report(report, config.out_path)
        else:
            sys.stdout.write(render_report(report))
        return 0 if report.passed else 1
    except UsageError as e:
        log.error("Usage error", message=e.error_message)
        sys.stderr.write(f"nc-concentration: {e.error_message}\n")
        return 2
    except ConcentrationError as e:
        log.error("Run failed", code=e.code, message=e.error_message)
        _print_error(e, config)
        return 1
    except ValidationError as e:
        log.error("Invalid parameters", error=str(e))
        _print_error(ConcentrationError(f"Invalid parameters: {e}", e), config)
        return 1


if __name__ == "__main__":
    sys.exit(main())
