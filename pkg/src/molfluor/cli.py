"""Command-line front end: sweeps, single points, peak reports, comparisons.

Subcommands
-----------
sweep        run a detuning sweep and emit CSV (stdout or --out)
point        solve a single detuning and emit a one-row CSV
peaks        detect peaks in a sweep CSV produced by ``sweep``
compare      numeric vs closed-form sweep, print deviation summary
preset-list  list the bundled parameter presets

Every physical parameter is settable by a long flag mirroring the
``ModelParams`` field name (``--omega-ab``, ``--gamma-u``, ...).  An optional
``--config FILE`` supplies flat ``key=value`` lines; precedence is
defaults < preset < config file < flags.

Exit codes: 0 success, 1 validation error, 2 solver failure, 3 I/O error.
"""

from __future__ import annotations

import argparse
import sys
from dataclasses import fields

from .model import ModelParams
from .lindblad import SteadyStateError, IntegrationError
from .sweep import (
    CSV_HEADER,
    CsvFormatError,
    SweepConfig,
    SweepError,
    SweepResult,
    TRACE_IDS,
    PRESET_NAMES,
    compare_sweep,
    detect_peaks,
    evaluate_point,
    preset,
    read_csv,
    run_sweep,
    write_csv,
)

EXIT_OK = 0
EXIT_VALIDATION = 1
EXIT_SOLVER = 2
EXIT_IO = 3

_PARAM_FIELDS = tuple(f.name for f in fields(ModelParams))
_SWEEP_KEYS = ("delta_min", "delta_max", "points", "mode", "prominence", "out")


class UsageError(ValueError):
    """Bad command line or config file contents."""


class _Parser(argparse.ArgumentParser):
    # argparse exits with status 2 on usage errors; route them through the
    # validation exit code instead.
    def error(self, message):
        raise UsageError(message)


def _add_param_flags(parser: argparse.ArgumentParser) -> None:
    for name in _PARAM_FIELDS:
        parser.add_argument("--" + name.replace("_", "-"), dest=name,
                            type=float, default=None, metavar="X",
                            help=f"ModelParams.{name}")


def _add_sweep_flags(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--delta-min", dest="delta_min", type=float, default=None)
    parser.add_argument("--delta-max", dest="delta_max", type=float, default=None)
    parser.add_argument("--points", type=int, default=None)
    parser.add_argument("--mode", choices=("numeric", "analytic_2ph",
                                           "analytic_cascade", "cascade_solver",
                                           "compare"), default=None)
    parser.add_argument("--preset", choices=PRESET_NAMES, default=None)
    parser.add_argument("--config", default=None, metavar="FILE",
                        help="flat key=value file; flags override it")
    parser.add_argument("--out", default=None, metavar="CSV")


def _read_config(path: str) -> dict[str, str]:
    try:
        with open(path) as fh:
            text = fh.read()
    except OSError as exc:
        raise UsageError(f"cannot read config file: {exc}") from exc
    values: dict[str, str] = {}
    for n, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        if "=" not in line:
            raise UsageError(f"{path}:{n}: expected key=value, got {raw!r}")
        key, _, value = line.partition("=")
        key = key.strip().replace("-", "_")
        if key not in _PARAM_FIELDS and key not in _SWEEP_KEYS:
            raise UsageError(f"{path}:{n}: unknown key {key!r}")
        values[key] = value.strip()
    return values


def _merge(args: argparse.Namespace) -> tuple[list[SweepConfig], str | None]:
    """Resolve preset + config file + flags into sweep configurations."""
    if args.preset is not None:
        configs = preset(args.preset)
    else:
        configs = [SweepConfig(params=ModelParams())]

    overrides: dict[str, str] = {}
    if getattr(args, "config", None):
        overrides.update(_read_config(args.config))
    for key in (*_PARAM_FIELDS, "delta_min", "delta_max", "points", "mode"):
        value = getattr(args, key, None)
        if value is not None:
            overrides[key] = value

    out = overrides.pop("out", None)
    if getattr(args, "out", None) is not None:
        out = args.out
    prominence = overrides.pop("prominence", None)
    if prominence is not None:
        args.prominence = float(prominence)

    merged = []
    for cfg in configs:
        param_kwargs = {}
        sweep_kwargs = {"delta_min": cfg.delta_min, "delta_max": cfg.delta_max,
                        "points": cfg.points, "mode": cfg.mode}
        for key, value in overrides.items():
            if key in _PARAM_FIELDS:
                param_kwargs[key] = float(value)
            elif key == "points":
                sweep_kwargs[key] = int(value)
            elif key == "mode":
                sweep_kwargs[key] = str(value)
            else:
                sweep_kwargs[key] = float(value)
        merged.append(SweepConfig(params=cfg.params.replace(**param_kwargs),
                                  **sweep_kwargs))
    return merged, out


def _write_or_print(result, out: str | None, suffix: str = "") -> None:
    if out is None:
        sys.stdout.write("\n".join(
            [CSV_HEADER,
             *(",".join(f"{v:.17g}" for v in row) for row in result.data)],
        ) + "\n")
        return
    path = out
    if suffix:
        stem, dot, ext = out.rpartition(".")
        path = f"{stem}{suffix}.{ext}" if dot else f"{out}{suffix}"
    write_csv(result, path)
    print(f"wrote {path}")


def _cmd_sweep(args) -> int:
    configs, out = _merge(args)
    if len(configs) > 1 and out is None:
        raise UsageError("this preset expands to several sweeps; --out is required")
    for i, cfg in enumerate(configs):
        suffix = f"_{i}" if len(configs) > 1 else ""
        if args.preset == "fig_alpha" and len(configs) > 1:
            alpha = cfg.params.gamma_b / cfg.params.gamma_u
            suffix = f"_alpha{alpha:g}"
        _write_or_print(run_sweep(cfg), out, suffix)
    return EXIT_OK


def _cmd_point(args) -> int:
    configs, out = _merge(args)
    cfg = configs[0]
    if cfg.mode == "compare":
        raise UsageError("compare mode applies to sweeps, not single points")
    row = evaluate_point(cfg.params, cfg.params.delta_2ph, cfg.mode)
    _write_or_print(SweepResult(data=[row]), out)
    return EXIT_OK


def _cmd_peaks(args) -> int:
    result = read_csv(args.infile)
    report = detect_peaks(result, args.trace, args.prominence)
    print(f"# trace={report.trace_id} peaks={len(report.peaks)}")
    print("delta,height,prominence")
    for delta, height, prom in report.peaks:
        print(f"{delta:.17g},{height:.17g},{prom:.17g}")
    return EXIT_OK


def _cmd_compare(args) -> int:
    configs, out = _merge(args)
    for cfg in configs:
        report = compare_sweep(cfg)
        print(f"# compare mode={report.analytic_mode} points={cfg.points} "
              f"range=[{cfg.delta_min},{cfg.delta_max}]")
        for name in TRACE_IDS:
            print(f"max_rel_deviation[{name}] = "
                  f"{report.max_rel_deviation[name]:.6g}")
        if out is not None:
            stem, dot, ext = out.rpartition(".")
            base = stem if dot else out
            ext = ext if dot else "csv"
            write_csv(report.numeric, f"{base}_numeric.{ext}")
            write_csv(report.analytic, f"{base}_analytic.{ext}")
            print(f"wrote {base}_numeric.{ext} and {base}_analytic.{ext}")
    return EXIT_OK


def _cmd_preset_list(_args) -> int:
    for name in PRESET_NAMES:
        for cfg in preset(name):
            p = cfg.params
            print(f"{name}: omega_ab={p.omega_ab} omega_bc={p.omega_bc} "
                  f"q={p.q} omega12={p.omega12} delta_1ph={p.delta_1ph} "
                  f"gamma_u={p.gamma_u} gamma_v={p.gamma_v} "
                  f"gamma_b={p.gamma_b} gamma_d={p.gamma_d} "
                  f"p_u={p.p_u} p_v={p.p_v}")
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="molfluor",
                     description="Five-level quantum-interference fluorescence "
                                 "model: sweeps, peaks, closed-form comparisons.")
    sub = parser.add_subparsers(dest="command", required=True)

    p_sweep = sub.add_parser("sweep", help="run a detuning sweep, emit CSV")
    _add_sweep_flags(p_sweep)
    _add_param_flags(p_sweep)
    p_sweep.set_defaults(func=_cmd_sweep)

    p_point = sub.add_parser("point", help="solve one detuning, emit one CSV row")
    _add_sweep_flags(p_point)
    _add_param_flags(p_point)
    p_point.set_defaults(func=_cmd_point)

    p_peaks = sub.add_parser("peaks", help="detect peaks in a sweep CSV")
    p_peaks.add_argument("--in", dest="infile", required=True, metavar="CSV")
    p_peaks.add_argument("--trace", choices=TRACE_IDS, default="i_u")
    p_peaks.add_argument("--prominence", type=float, default=0.02)
    p_peaks.set_defaults(func=_cmd_peaks)

    p_cmp = sub.add_parser("compare", help="numeric vs closed form deviations")
    _add_sweep_flags(p_cmp)
    _add_param_flags(p_cmp)
    p_cmp.set_defaults(func=_cmd_compare)

    p_list = sub.add_parser("preset-list", help="list bundled presets")
    p_list.set_defaults(func=_cmd_preset_list)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        return args.func(args)
    except UsageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_VALIDATION
    except (SteadyStateError, IntegrationError, SweepError) as exc:
        print(f"solver failure: {exc}", file=sys.stderr)
        return EXIT_SOLVER
    except CsvFormatError as exc:
        print(f"I/O error: {exc}", file=sys.stderr)
        return EXIT_IO
    except OSError as exc:
        print(f"I/O error: {exc}", file=sys.stderr)
        return EXIT_IO
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_VALIDATION


def entry() -> None:
    sys.exit(main())


if __name__ == "__main__":
    sys.exit(main())
