"""Command-line front end.

Subcommands: ``classify`` (scenario report for three density specs),
``replicate`` (the standard three-scenario study at desk scale),
``simulate`` (a fully custom run), and ``bounds`` (asymptotic bound
table).  Density specs use the form ``gaussian:<mean>:<variance>``.

Exit codes: 0 success, 2 usage or validation error, 3 I/O error.
A JSON config file passed with --config supplies defaults for any flag;
explicit flags win.  The environment variable QCD_SEED supplies the
default seed.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from typing import Sequence

from .distributions import parse_density_spec
from .harness import (
    DEFAULT_NU_GRID,
    run_experiment,
    write_records_csv,
    write_summary_csv,
)
from .detectors import DetectorKind
from .theory import bounds as theory_bounds
from .theory import classify, scenario_preset

DEFAULT_B_GRID = (1.5, 2.0, 2.5, 3.0, 3.5, 4.0)
DEFAULT_TRIALS = 60
DETECTOR_NAMES = [k.value for k in DetectorKind]


def _load_config(path: str | None) -> dict:
    if not path:
        return {}
    with open(path) as fh:
        data = json.load(fh)
    if not isinstance(data, dict):
        raise ValueError("config file must hold a JSON object")
    return {key.replace("-", "_"): value for key, value in data.items()}


def _resolve(args: argparse.Namespace, config: dict, name: str, default):
    value = getattr(args, name, None)
    if value is not None:
        return value
    if name in config:
        return config[name]
    return default


def _default_seed() -> int:
    raw = os.environ.get("QCD_SEED", "0")
    try:
        seed = int(raw)
    except ValueError:
        raise ValueError(f"QCD_SEED must be an integer, got {raw!r}") from None
    if seed < 0:
        raise ValueError(f"seed must be >= 0, got {seed}")
    return seed


def _parse_models(specs: Sequence[str]):
    models = tuple(parse_density_spec(spec) for spec in specs)
    if models[0] == models[1] or models[0] == models[2] or models[1] == models[2]:
        raise ValueError("the three density specs must be pairwise distinct")
    return models


def _output_path(template: str, out_dir: str, scenario: str, multi: bool) -> str:
    if "{scenario}" in template:
        name = template.format(scenario=scenario)
    elif multi:
        stem, dot, ext = template.rpartition(".")
        name = f"{stem}-scenario{scenario}.{ext}" if dot else f"{template}-scenario{scenario}"
    else:
        name = template
    return os.path.join(out_dir, name)


def _add_run_flags(sub: argparse.ArgumentParser) -> None:
    sub.add_argument(
        "--detectors",
        nargs="+",
        choices=DETECTOR_NAMES,
        help=f"detectors to run (default: all of {' '.join(DETECTOR_NAMES)})",
    )
    sub.add_argument(
        "--b-grid",
        dest="b_grid",
        type=float,
        nargs="+",
        help=f"thresholds b with b0 = bC = b (default: {' '.join(str(b) for b in DEFAULT_B_GRID)})",
    )
    sub.add_argument("--trials", type=int, help=f"trials per cell (default: {DEFAULT_TRIALS})")
    sub.add_argument("--seed", type=int, help="experiment seed (default: QCD_SEED env var, else 0)")
    sub.add_argument(
        "--nu-grid",
        dest="nu_grid",
        action="store_const",
        const=list(DEFAULT_NU_GRID),
        help=f"probe the confusing regime over nu in {DEFAULT_NU_GRID} instead of nu = 1 only "
        "(default: off)",
    )
    sub.add_argument("--horizon-rl", dest="horizon_rl", type=int, help="override the run-length horizon (default: ceil(50 e^b))")
    sub.add_argument("--horizon-delay", dest="horizon_delay", type=int, help="override the delay horizon (default: ceil(200 b / min KL))")
    sub.add_argument("--workers", type=int, help="parallel worker processes (default: 1)")
    sub.add_argument("--records", help="records CSV name template (default: records-scenario{scenario}.csv)")
    sub.add_argument("--summary", help="summary CSV name template (default: summary-scenario{scenario}.csv)")
    sub.add_argument("--out-dir", dest="out_dir", help="output directory (default: .)")
    sub.add_argument("--config", help="JSON config file supplying flag defaults; flags win (default: none)")


def _run_one_scenario(models, scenario_label: str, args, config, multi: bool) -> None:
    detector_names = _resolve(args, config, "detectors", list(DETECTOR_NAMES))
    detectors = [DetectorKind(name) for name in detector_names]
    b_grid = [float(b) for b in _resolve(args, config, "b_grid", list(DEFAULT_B_GRID))]
    trials = int(_resolve(args, config, "trials", DEFAULT_TRIALS))
    seed = int(_resolve(args, config, "seed", _default_seed()))
    if seed < 0:
        raise ValueError(f"seed must be >= 0, got {seed}")
    nu_grid = _resolve(args, config, "nu_grid", None)
    horizon_rl = _resolve(args, config, "horizon_rl", None)
    horizon_delay = _resolve(args, config, "horizon_delay", None)
    workers = int(_resolve(args, config, "workers", 1))
    records_tpl = _resolve(args, config, "records", "records-scenario{scenario}.csv")
    summary_tpl = _resolve(args, config, "summary", "summary-scenario{scenario}.csv")
    out_dir = _resolve(args, config, "out_dir", ".")

    pre, confusing, bad = models
    records, summary = run_experiment(
        pre,
        confusing,
        bad,
        detectors=detectors,
        thresholds=b_grid,
        trials=trials,
        seed=seed,
        scenario=scenario_label,
        nu_grid=nu_grid,
        horizon_rl=horizon_rl,
        horizon_delay=horizon_delay,
        workers=workers,
    )
    records_path = _output_path(records_tpl, out_dir, summary.scenario, multi)
    summary_path = _output_path(summary_tpl, out_dir, summary.scenario, multi)
    write_records_csv(records, records_path)
    write_summary_csv(summary, summary_path)
    print(f"scenario {summary.scenario}: {len(records)} records -> {records_path}")
    print(f"scenario {summary.scenario}: {len(summary.rows)} summary rows -> {summary_path}")


def _cmd_classify(args: argparse.Namespace) -> int:
    pre, confusing, bad = _parse_models(args.models)
    report = classify(pre, confusing, bad)
    payload = report.to_dict()
    payload["models"] = {"pre": pre.label, "confusing": confusing.label, "bad": bad.label}
    print(json.dumps(payload, indent=2, sort_keys=True))
    return 0


def _cmd_bounds(args: argparse.Namespace) -> int:
    pre, confusing, bad = _parse_models(args.models)
    rows = []
    for gamma in args.gamma:
        bset = theory_bounds(gamma, pre, confusing, bad)
        rows.append((bset.gamma, bset.universal_lower, bset.s_upper, bset.j_upper))
    lines = ["gamma,universal_lower,s_upper,j_upper"]
    lines += [f"{g:.6g},{lo:.6g},{su:.6g},{ju:.6g}" for g, lo, su, ju in rows]
    text = "\n".join(lines) + "\n"
    if args.out:
        with open(args.out, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    return 0


def _cmd_replicate(args: argparse.Namespace) -> int:
    config = _load_config(args.config)
    which = [1, 2, 3] if args.scenario == "all" else [int(args.scenario)]
    multi = len(which) > 1
    for s in which:
        _run_one_scenario(scenario_preset(s), str(s), args, config, multi)
    return 0


def _cmd_simulate(args: argparse.Namespace) -> int:
    config = _load_config(args.config)
    models = _parse_models(args.models)
    scenario_label = str(int(classify(*models).scenario))
    _run_one_scenario(models, scenario_label, args, config, multi=False)
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="confusum",
        description="Sequential change detection with a confusing change: "
        "scenario classification, bound tables, and Monte Carlo replication.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p_classify = sub.add_parser(
        "classify", help="classify a (pre, confusing, bad) triple into scenario 1, 2, or 3"
    )
    p_classify.add_argument(
        "models", nargs=3, metavar=("PRE", "CONFUSING", "BAD"), help="density specs, e.g. gaussian:0:1"
    )
    p_classify.set_defaults(func=_cmd_classify)

    p_replicate = sub.add_parser(
        "replicate", help="run the standard simulation study for one scenario or all three"
    )
    p_replicate.add_argument("scenario", choices=["1", "2", "3", "all"], help="scenario preset")
    _add_run_flags(p_replicate)
    p_replicate.set_defaults(func=_cmd_replicate)

    p_simulate = sub.add_parser("simulate", help="run a fully custom experiment")
    p_simulate.add_argument(
        "models", nargs=3, metavar=("PRE", "CONFUSING", "BAD"), help="density specs, e.g. gaussian:0:1"
    )
    _add_run_flags(p_simulate)
    p_simulate.set_defaults(func=_cmd_simulate)

    p_bounds = sub.add_parser("bounds", help="asymptotic delay-bound table for a model triple")
    p_bounds.add_argument(
        "models", nargs=3, metavar=("PRE", "CONFUSING", "BAD"), help="density specs, e.g. gaussian:0:1"
    )
    p_bounds.add_argument(
        "--gamma", type=float, nargs="+", required=True, help="run-length targets gamma > 1"
    )
    p_bounds.add_argument("--out", help="write the table to this path instead of stdout (default: stdout)")
    p_bounds.set_defaults(func=_cmd_bounds)

    return parser


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except OSError as exc:
        print(f"i/o error: {exc}", file=sys.stderr)
        return 3


if __name__ == "__main__":
    sys.exit(main())
