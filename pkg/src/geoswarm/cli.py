"""Command-line interface.

Subcommands mirror the study layout: ``simulate`` executes one scenario,
``dictionaries``/``sensing-range``/``practical`` produce the comparison
tables, and ``trajectories`` dumps plot-ready curves.  Every command
writes CSV (plus a summary JSON for ``simulate``) into the output
directory and renders a matplotlib figure next to it unless
``--no-figure`` is given.

Exit codes: 0 success, 2 configuration failure, 3 numerical failure.
"""

from __future__ import annotations

import argparse
import sys
from pathlib import Path

from . import reports
from .config import PRESET_NAMES, load_config, preset_config
from .errors import ConfigError, NumericalError
from .observables import Dictionary
from .scenario import (
    PRACTICAL_MODES,
    build_geometry,
    compare_dictionaries,
    practical_modes,
    run_scenario,
    sensing_range,
)

ALL_CHOICES = "abcdefg"


def _add_scenario_args(sub, multi_preset=False):
    if multi_preset:
        sub.add_argument(
            "--preset",
            action="append",
            choices=PRESET_NAMES,
            help="built-in scenario preset; may repeat (default: all three)",
        )
    else:
        sub.add_argument(
            "--preset",
            choices=PRESET_NAMES,
            help="built-in scenario preset (default: type1)",
        )
    sub.add_argument("--config", type=Path, help="scenario config file")
    sub.add_argument(
        "--outdir", type=Path, default=Path("out"), help="output directory (default: ./out)"
    )
    sub.add_argument("--no-figure", action="store_true", help="skip figure rendering")


def _single_scenario(args):
    if args.config is not None and args.preset:
        raise ConfigError("give either --preset or --config, not both")
    if args.config is not None:
        return str(args.config), load_config(args.config)
    name = args.preset or "type1"
    return name, preset_config(name)


def _scenario_list(args):
    if args.config is not None:
        if args.preset:
            raise ConfigError("give either --preset or --config, not both")
        return [(str(args.config), load_config(args.config))]
    names = args.preset or list(PRESET_NAMES)
    return [(name, preset_config(name)) for name in names]


def _parse_choices(text: str):
    letters = [c for c in text.replace(",", "").replace(" ", "") if c]
    if not letters:
        raise ConfigError("no dictionary choices given")
    return [Dictionary.parse(c) for c in letters]


def cmd_simulate(args) -> int:
    name, cfg = _single_scenario(args)
    report = run_scenario(cfg)
    csv_path = reports.write_text(args.outdir / "run.csv", reports.run_csv_text(report))
    json_path = reports.write_text(
        args.outdir / "summary.json", reports.summary_json_text(report)
    )
    print(f"scenario {name}: rmse={report.rmse:.6g} "
          f"avg_sensing_range={report.avg_sensing_range:.6g}")
    print(f"wrote {csv_path}")
    print(f"wrote {json_path}")
    if not args.no_figure:
        from .plots import render_run_figure

        fig_path = render_run_figure(report, args.outdir / "simulate.png")
        print(f"wrote {fig_path}")
    return 0


def cmd_trajectories(args) -> int:
    name, cfg = _single_scenario(args)
    report = run_scenario(cfg)
    csv_path = reports.write_text(
        args.outdir / "trajectories.csv", reports.trajectories_csv_text(report)
    )
    print(f"scenario {name}: {len(report.geometry.leader)} leader samples, "
          f"{len(report.geometry.ideal)} ideal points")
    print(f"wrote {csv_path}")
    if not args.no_figure:
        from .plots import render_run_figure

        fig_path = render_run_figure(report, args.outdir / "trajectories.png")
        print(f"wrote {fig_path}")
    return 0


def cmd_dictionaries(args) -> int:
    name, cfg = _single_scenario(args)
    choices = _parse_choices(args.choices)
    rows = compare_dictionaries(cfg, choices)
    table = [(choice.value, float(value)) for choice, value in rows]
    csv_path = reports.write_text(
        args.outdir / "dictionaries.csv", reports.table_csv_text(("choice", "rmse"), table)
    )
    for letter, value in table:
        print(f"{name} choice {letter}: rmse={value:.6g}")
    print(f"wrote {csv_path}")
    if not args.no_figure:
        from .plots import render_bar_figure

        fig_path = render_bar_figure(
            args.outdir / "dictionaries.png",
            [letter for letter, _ in table],
            {"rmse": [value for _, value in table]},
            ylabel="RMSE",
            title=f"dictionary comparison ({name})",
        )
        print(f"wrote {fig_path}")
    return 0


def cmd_sensing_range(args) -> int:
    scenarios = _scenario_list(args)
    table = []
    for name, cfg in scenarios:
        geom = build_geometry(cfg)
        with_est = sensing_range(cfg, True, geom)
        without = sensing_range(cfg, False, geom)
        table.append((name, with_est, without))
        print(f"{name}: with_estimation={with_est:.6g} without_estimation={without:.6g}")
    csv_path = reports.write_text(
        args.outdir / "sensing_range.csv",
        reports.table_csv_text(("scenario", "with_estimation", "without_estimation"), table),
    )
    print(f"wrote {csv_path}")
    if not args.no_figure:
        from .plots import render_bar_figure

        fig_path = render_bar_figure(
            args.outdir / "sensing_range.png",
            [row[0] for row in table],
            {
                "with estimation": [row[1] for row in table],
                "without estimation": [row[2] for row in table],
            },
            ylabel="average sensing range",
            title="required sensing range",
        )
        print(f"wrote {fig_path}")
    return 0


def cmd_practical(args) -> int:
    scenarios = _scenario_list(args)
    table = []
    per_mode = {mode: [] for mode in PRACTICAL_MODES}
    for name, cfg in scenarios:
        for mode, value in practical_modes(cfg):
            table.append((name, mode.value, value))
            per_mode[mode].append(value)
            print(f"{name} mode {mode.value}: rmse={value:.6g}")
    csv_path = reports.write_text(
        args.outdir / "practical.csv",
        reports.table_csv_text(("scenario", "mode", "rmse"), table),
    )
    print(f"wrote {csv_path}")
    if not args.no_figure:
        from .plots import render_bar_figure

        fig_path = render_bar_figure(
            args.outdir / "practical.png",
            [name for name, _ in scenarios],
            {mode.value: values for mode, values in per_mode.items()},
            ylabel="RMSE",
            title="practical velocity handling",
        )
        print(f"wrote {fig_path}")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="geoswarm",
        description="Formation-keeping simulator with streaming one-step estimation",
    )
    subs = parser.add_subparsers(dest="command", required=True)

    sub = subs.add_parser("simulate", help="run one scenario and write its report")
    _add_scenario_args(sub)
    sub.set_defaults(func=cmd_simulate)

    sub = subs.add_parser("dictionaries", help="RMSE comparison across dictionary choices")
    _add_scenario_args(sub)
    sub.add_argument(
        "--choices", default=ALL_CHOICES, help="dictionary letters to compare (default: all)"
    )
    sub.set_defaults(func=cmd_dictionaries)

    sub = subs.add_parser(
        "sensing-range", help="average sensing range with and without estimation"
    )
    _add_scenario_args(sub, multi_preset=True)
    sub.set_defaults(func=cmd_sensing_range)

    sub = subs.add_parser("practical", help="RMSE of the practical velocity modes")
    _add_scenario_args(sub, multi_preset=True)
    sub.set_defaults(func=cmd_practical)

    sub = subs.add_parser("trajectories", help="plot-ready CSV of the scenario curves")
    _add_scenario_args(sub)
    sub.set_defaults(func=cmd_trajectories)

    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except (ConfigError, ValueError) as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 2
    except NumericalError as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return 3


if __name__ == "__main__":
    sys.exit(main())
