"""Command-line front end.

Subcommands: ``run`` (one simulation, writes history/final-field/verdict),
``limits`` (sweep the stability coefficients over RK schemes), ``coef``
(print the SSP coefficient of a built-in or file-defined tableau).

Exit codes: 0 success/pass, 1 usage or config error, 2 a stability
violation was recorded by ``run``.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from .fields import field_to_csv
from .integrator import simulate
from .limits import limits_table
from .presets import PRESET_IDS, preset_config
from .tableau import (
    BUILTIN_SCHEME_IDS,
    TableauFormatError,
    builtin_scheme,
    ssp_coefficient,
    tableau_from_text,
    validate_consistency,
)

__all__ = ["main"]

_CONFIG_KEYS = {
    "experiment",
    "scheme",
    "dt_factor",
    "t_final",
    "n_cells",
    "monitor",
    "tolerance",
}


class _CliError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):  # usage errors must map to exit code 1, not 2
        raise _CliError(message)


def _add_common_run_flags(p: argparse.ArgumentParser) -> None:
    p.add_argument("--n-cells", type=int, default=None, help="override grid resolution")
    p.add_argument("--t-final", type=float, default=None, help="override final time")
    p.add_argument("--tolerance", type=float, default=None, help="monitor tolerance")
    p.add_argument(
        "--tv-wrap",
        choices=("on", "off"),
        default=None,
        help="force the periodic wrap term of the total variation on or off",
    )
    p.add_argument(
        "--lf",
        choices=("local", "global"),
        default="local",
        help="Lax-Friedrichs dissipation: per-interface or global wavespeed",
    )


def _build_parser() -> _Parser:
    parser = _Parser(prog="rkstab", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    run = sub.add_parser("run", help="run one simulation and write its history")
    run.add_argument("target", help="experiment preset id or JSON config file")
    run.add_argument("--scheme", default=None, help=f"RK scheme ({', '.join(BUILTIN_SCHEME_IDS)})")
    run.add_argument("--dt-factor", type=float, default=None, help="step multiplier c (dt = c * dt_FE)")
    run.add_argument("--out", default="rkstab_out", help="output directory")
    run.add_argument("--record-every", type=int, default=1, help="history CSV row stride")
    _add_common_run_flags(run)
    run.set_defaults(func=cmd_run)

    lim = sub.add_parser("limits", help="measure c^p and c^s over a sweep of step multipliers")
    lim.add_argument("preset", help="experiment preset id")
    lim.add_argument(
        "--schemes",
        default="all",
        help="comma-separated scheme ids, or 'all'",
    )
    lim.add_argument("--c-min", type=float, default=0.1)
    lim.add_argument("--c-max", type=float, default=5.0)
    lim.add_argument("--granularity", type=float, default=0.1)
    lim.add_argument("--refine", action="store_true", help="bisect each limit to 0.01")
    lim.add_argument("--workers", type=int, default=1, help="parallel candidate simulations")
    lim.add_argument("--out", default=None, help="JSON output path (CSV written alongside)")
    _add_common_run_flags(lim)
    lim.set_defaults(func=cmd_limits)

    coef = sub.add_parser("coef", help="print the SSP coefficient of a tableau")
    coef.add_argument("target", help="built-in scheme id or plain-text tableau file")
    coef.add_argument("--tol", type=float, default=1e-9, help="bisection tolerance")
    coef.set_defaults(func=cmd_coef)

    return parser


def _tv_wrap_flag(value: str | None) -> bool | None:
    if value is None:
        return None
    return value == "on"


def _load_run_settings(args) -> dict:
    """Merge preset id / config file with CLI overrides."""
    settings: dict = {}
    if args.target in PRESET_IDS:
        settings["experiment"] = args.target
    else:
        path = Path(args.target)
        if not path.is_file():
            raise _CliError(
                f"{args.target!r} is neither a preset ({', '.join(PRESET_IDS)}) "
                "nor an existing config file"
            )
        try:
            loaded = json.loads(path.read_text())
        except json.JSONDecodeError as exc:
            raise _CliError(f"malformed JSON config {args.target}: {exc}") from None
        if not isinstance(loaded, dict):
            raise _CliError("config file must hold a JSON object")
        unknown = set(loaded) - _CONFIG_KEYS
        if unknown:
            raise _CliError(f"unknown config keys: {', '.join(sorted(unknown))}")
        if "experiment" not in loaded:
            raise _CliError("config file must name an 'experiment'")
        settings.update(loaded)
    if args.scheme is not None:
        settings["scheme"] = args.scheme
    if args.dt_factor is not None:
        settings["dt_factor"] = args.dt_factor
    if args.t_final is not None:
        settings["t_final"] = args.t_final
    if args.n_cells is not None:
        settings["n_cells"] = args.n_cells
    if args.tolerance is not None:
        settings["tolerance"] = args.tolerance
    settings.setdefault("scheme", "rk44")
    settings.setdefault("dt_factor", 1.0)
    return settings


def cmd_run(args) -> int:
    settings = _load_run_settings(args)
    scheme_id = settings["scheme"]
    if scheme_id not in BUILTIN_SCHEME_IDS:
        raise _CliError(
            f"unknown scheme {scheme_id!r}; valid schemes: {', '.join(BUILTIN_SCHEME_IDS)}"
        )
    config = preset_config(
        settings["experiment"],
        scheme_id=scheme_id,
        dt_factor=float(settings["dt_factor"]),
        n_cells=settings.get("n_cells"),
        t_final=settings.get("t_final"),
        tolerance=settings.get("tolerance"),
        monitor_kind=settings.get("monitor"),
        tv_wrap=_tv_wrap_flag(args.tv_wrap),
        lf=args.lf,
        record_every=args.record_every,
    )
    record = simulate(config)

    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    record.write_csv(out / "history.csv")
    field_to_csv(record.final_field, out / "final_field.csv")
    v = record.verdict
    verdict = {
        "experiment": settings["experiment"],
        "scheme": scheme_id,
        "dt_factor": float(settings["dt_factor"]),
        "monitor": config.monitor.kind,
        "passed": v.passed,
        "step_pass": v.step_pass,
        "shifted_pass": v.shifted_pass,
        "first_step_failure": v.first_step_failure,
        "first_shifted_failure": v.first_shifted_failure,
        "aborted_step": v.aborted_step,
        "abort_reason": v.abort_reason,
        "n_steps": record.n_steps,
        "t_final": config.t_final,
    }
    (out / "verdict.json").write_text(json.dumps(verdict, indent=2) + "\n")
    print(
        f"{settings['experiment']} / {scheme_id} @ dt_factor={settings['dt_factor']}: "
        + ("pass" if v.passed else "stability violation recorded")
    )
    return 0 if v.passed else 2


def cmd_limits(args) -> int:
    if args.preset not in PRESET_IDS:
        raise _CliError(f"unknown preset {args.preset!r}; valid: {', '.join(PRESET_IDS)}")
    if args.schemes == "all":
        schemes = list(BUILTIN_SCHEME_IDS)
    else:
        schemes = [s.strip() for s in args.schemes.split(",") if s.strip()]
        bad = [s for s in schemes if s not in BUILTIN_SCHEME_IDS]
        if bad:
            raise _CliError(
                f"unknown schemes: {', '.join(bad)}; valid: {', '.join(BUILTIN_SCHEME_IDS)}"
            )
    table = limits_table(
        args.preset,
        schemes,
        c_min=args.c_min,
        c_max=args.c_max,
        granularity=args.granularity,
        refine=args.refine,
        workers=args.workers,
        n_cells=args.n_cells,
        t_final=args.t_final,
        tolerance=args.tolerance,
        tv_wrap=_tv_wrap_flag(args.tv_wrap),
        lf=args.lf,
    )
    out = Path(args.out) if args.out else Path(f"limits_{args.preset}.json")
    out.write_text(json.dumps(table.to_json_dict(), indent=2) + "\n")
    table.write_csv(out.with_suffix(".csv"))
    print(table.format_summary())
    print(f"written: {out} and {out.with_suffix('.csv')}")
    return 0


def cmd_coef(args) -> int:
    if args.target in BUILTIN_SCHEME_IDS:
        t = builtin_scheme(args.target)
    else:
        path = Path(args.target)
        if not path.is_file():
            raise _CliError(
                f"{args.target!r} is neither a built-in scheme "
                f"({', '.join(BUILTIN_SCHEME_IDS)}) nor a tableau file"
            )
        try:
            t = tableau_from_text(path.read_text())
        except TableauFormatError as exc:
            raise _CliError(f"{args.target}: {exc}") from None
    report = validate_consistency(t)
    if not report.ok:
        raise _CliError(f"tableau {t.name!r} is inconsistent: {report}")
    analysis = ssp_coefficient(t, tol=args.tol)
    flag = "true" if analysis.satisfies_assumption1 else "false"
    print(f"c_ssp = {analysis.ssp_coefficient:.6f}, assumption1 = {flag}")
    return 0


def main(argv=None) -> int:
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
        return args.func(args)
    except _CliError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except (ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
