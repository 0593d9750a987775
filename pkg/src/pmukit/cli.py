"""Command-line interface.

    pmukit analyze <dataset.csv> [--out report.json] [--filter-order N]
                   [--acf-lags K] [--pencil-window S] [--pencil-step S]
                   [--outlier-window N] [--outlier-threshold T] [--no-modal]
    pmukit synthesize <config.json> --out dataset.csv [--seed SEED]

Exit codes: 0 ok, 1 usage error, 2 data error, 3 numerical failure.
Set PMUKIT_LOG=debug|info|warning for log verbosity (stderr).
"""

from __future__ import annotations

import argparse
import json
import logging
import os
import sys
from pathlib import Path

from . import __version__
from .analysis import AnalyzeOptions, analyze_fleet
from .anomaly import OutlierConfig
from .config import parse_config
from .dataset_io import read_dataset, write_dataset
from .errors import NumericalFailure, PmukitError
from .modal import PencilConfig
from .report import write_report
from .synthesis import run_pipeline

log = logging.getLogger("pmukit")

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_DATA = 2
EXIT_NUMERICAL = 3


def _setup_logging() -> None:
    level = os.environ.get("PMUKIT_LOG", "warning").upper()
    logging.basicConfig(
        stream=sys.stderr,
        level=getattr(logging, level, logging.WARNING),
        format="%(levelname)s %(name)s: %(message)s",
    )


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="pmukit", description="PMU data feature analysis and synthesis")
    parser.add_argument("--version", action="version", version=f"pmukit {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    pa = sub.add_parser("analyze", help="measure features of a dataset")
    pa.add_argument("dataset", type=Path)
    pa.add_argument("--out", type=Path, default=None, help="report path (default: <dataset>.report.json)")
    pa.add_argument("--filter-order", type=int, default=90)
    pa.add_argument("--acf-lags", type=int, default=20)
    pa.add_argument("--pencil-window", type=float, default=10.0, metavar="S")
    pa.add_argument("--pencil-step", type=float, default=5.0, metavar="S")
    pa.add_argument("--outlier-window", type=int, default=90)
    pa.add_argument("--outlier-threshold", type=float, default=3.0)
    pa.add_argument("--no-modal", action="store_true", help="skip the modal scan")

    ps = sub.add_parser("synthesize", help="generate a synthetic dataset from a config")
    ps.add_argument("config", type=Path)
    ps.add_argument("--out", type=Path, required=True, help="output dataset path")
    ps.add_argument("--seed", type=int, default=None, help="override the config seed")
    return parser


def _cmd_analyze(args) -> int:
    channels = read_dataset(args.dataset)
    options = AnalyzeOptions(
        filter_order=args.filter_order,
        acf_lags=args.acf_lags,
        outlier_cfg=OutlierConfig(window=args.outlier_window, threshold=args.outlier_threshold),
        pencil_cfg=PencilConfig(window_s=args.pencil_window, step_s=args.pencil_step),
        run_modal=not args.no_modal,
    )
    report = analyze_fleet(channels, options)
    out = args.out if args.out is not None else args.dataset.with_suffix(".report.json")
    write_report(report, out)
    log.info("report written to %s", out)
    return EXIT_OK


def _record_to_dict(pmu_id: str, record) -> dict:
    return {
        "pmu_id": pmu_id,
        "seed": record.injection.seed if record.injection else None,
        "injected_modes": [
            {
                "frequency_hz": m.frequency_hz,
                "amplitude": m.amplitude,
                "damping_factor": m.damping_factor,
                "start_s": m.start_s,
                "duration_s": m.duration_s,
            }
            for m in record.injected_modes
        ],
        "realized_noise_variance": record.realized_noise_variance,
        "outlier_indices": [int(i) for i in record.outlier_indices],
        "missing_indices": (
            [int(i) for i in record.missing_mask.nonzero()[0]] if record.missing_mask is not None else []
        ),
        "skew_s_per_s": record.skew_s_per_s,
    }


def _cmd_synthesize(args) -> int:
    plans = parse_config(args.config, seed_override=args.seed)
    channels = []
    records = []
    for plan in plans:
        series, record = run_pipeline(plan.baseline, plan.injection, pmu_id=plan.pmu_id)
        channels.append(series)
        records.append(_record_to_dict(plan.pmu_id, record))
    write_dataset(channels, args.out)
    record_path = Path(str(args.out) + ".truth.json")
    record_path.write_text(json.dumps(records, indent=2, sort_keys=True) + "\n")
    log.info("dataset written to %s, ground truth to %s", args.out, record_path)
    return EXIT_OK


def main(argv=None) -> int:
    _setup_logging()
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_USAGE if exc.code not in (0, None) else EXIT_OK
    try:
        if args.command == "analyze":
            return _cmd_analyze(args)
        return _cmd_synthesize(args)
    except NumericalFailure as exc:
        print(f"pmukit: numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL
    except PmukitError as exc:
        print(f"pmukit: {exc}", file=sys.stderr)
        return EXIT_DATA
    except FileNotFoundError as exc:
        print(f"pmukit: file not found: {exc.filename}", file=sys.stderr)
        return EXIT_DATA


if __name__ == "__main__":
    sys.exit(main())
