"""polyfreg: polynomial functional regression experiments.

Run: polyfreg toy-curve --out results/
     polyfreg evaluate --synthetic-surrogate --order 2 --out results/
"""

from __future__ import annotations

import argparse
import csv
import json
import logging
import os
import sys
import time
from dataclasses import asdict, dataclass, field
from importlib.metadata import PackageNotFoundError, version
from pathlib import Path
from typing import Sequence

import numpy as np
from dotenv import load_dotenv

from errors import ConfigError, PolyfregError
from experiments import (
    EvalConfig,
    default_threads,
    error_curve,
    eval_config,
    evaluate_runs,
    load_config_file,
    merge,
    parse_lambda_grid,
    surrogate_stenosis_dataset,
    toy_config,
    write_error_curve_csv,
    write_metrics_csv,
)
from experiments.config import threads_from
from funcdata import (
    Dataset,
    build_grid,
    common_interval_end,
    dataset_from_profiles,
    read_profiles_csv,
    read_wide_csv,
)
from funcdata.profiles import read_wide_header
from regression import LambdaVector, aggregate, fit, fit_grid, load_model, save_model
from regression.aggregation import write_report
from svg_plot import error_curve_svg, roc_svg, write_svg

logger = logging.getLogger("polyfreg")

COMMANDS = ("toy-curve", "evaluate", "fit", "aggregate", "predict")
LOG_LEVEL_ENV = "POLYFREG_LOG_LEVEL"
SURROGATE_STREAM = 1_000_003
SURROGATE_POSITIVES, SURROGATE_NEGATIVES = 7, 33
WIDE_INTERVAL_END = 1.0


def _version() -> str:
    try:
        return version("polyfreg")
    except PackageNotFoundError:
        return "0.1.0"


@dataclass
class RunManifest:
    """What was asked for, and enough of the outcome to replay it."""

    command: str
    output_dir: Path
    config_path: Path | None = None
    overrides: dict[str, str] = field(default_factory=dict)
    seed: int = 0
    threads: int = 1
    resolved: dict[str, str] = field(default_factory=dict)
    outputs: list[str] = field(default_factory=list)

    def write(self, wall_time: float) -> Path:
        record = asdict(self)
        record["output_dir"] = str(self.output_dir)
        record["config_path"] = None if self.config_path is None else str(self.config_path)
        record["version"] = _version()
        record["wall_time_s"] = round(wall_time, 3)
        path = self.output_dir / "run.json"
        path.write_text(json.dumps(record, indent=2, sort_keys=True) + "\n", encoding="utf-8")
        return path


# ── Data loading ────────────────────────────────────────────────────────


def load_labelled(
    path: str | Path,
    interval_end: float | None = None,
    grid_nodes: int = 256,
    interpolant: str = "linear",
) -> Dataset:
    """Wide (``id,label,v_1..``) or long (``id,position_mm,diameter_mm,label``) CSV."""
    path = Path(path)
    if not path.is_file():
        raise ConfigError(f"data file not found: {path}")
    header = read_wide_header(path)
    if header[:2] == ["id", "label"]:
        grid = build_grid(0.0, interval_end or WIDE_INTERVAL_END, len(header) - 2)
        return read_wide_csv(path, grid)
    profiles = read_profiles_csv(path)
    end = interval_end or common_interval_end(profiles)
    logger.info("%d profiles, interval [0, %g]", len(profiles), end)
    return dataset_from_profiles(profiles, build_grid(0.0, end, grid_nodes), interpolant)


# ── Commands ────────────────────────────────────────────────────────────


def run_toy_curve(manifest: RunManifest) -> int:
    config = toy_config(manifest.resolved)
    curve = error_curve(config, manifest.threads)
    out = manifest.output_dir
    manifest.outputs.append(str(write_error_curve_csv(curve, out / "error_curve.csv")))
    manifest.outputs.append(str(write_svg(error_curve_svg(curve.series()), out / "error_curve.svg")))
    curve.check_budget()
    logger.info("error curve written to %s", out)
    return 0


def _evaluation_data(manifest: RunManifest, args: argparse.Namespace, config: EvalConfig) -> Dataset:
    if args.synthetic_surrogate:
        grid = build_grid(0.0, config.interval_end or 140.0, config.grid_nodes)
        rng = np.random.default_rng([config.seed, SURROGATE_STREAM])
        logger.info("using synthetic surrogate vessels (not clinical data)")
        return surrogate_stenosis_dataset(
            SURROGATE_POSITIVES, SURROGATE_NEGATIVES, rng, grid, config.interpolant
        )
    if not args.data:
        raise ConfigError("evaluate needs --data PATH or --synthetic-surrogate")
    return load_labelled(args.data, config.interval_end, config.grid_nodes, config.interpolant)


def run_evaluate(manifest: RunManifest, args: argparse.Namespace) -> int:
    config = eval_config(manifest.resolved)
    dataset = _evaluation_data(manifest, args, config)
    summary = evaluate_runs(dataset, config, manifest.threads)
    out = manifest.output_dir
    manifest.outputs.append(str(write_metrics_csv(summary, out / "metrics.csv")))
    first = summary.runs[0]
    curves = {
        lam.label(): list(m.roc_points) for lam, m in zip(config.lambda_grid, first.models)
    }
    curves["AGG"] = list(first.aggregated.roc_points)
    svg = roc_svg(curves, f"ROC, {summary.family} models (run 0)")
    manifest.outputs.append(str(write_svg(svg, out / f"roc_{summary.family}.svg")))
    return 0


def run_fit(manifest: RunManifest, args: argparse.Namespace) -> int:
    if not args.data or not args.lam:
        raise ConfigError("fit needs --data PATH and --lambda l0,l1,...")
    try:
        lambdas = LambdaVector(tuple(float(v) for v in args.lam.split(",")))
    except ValueError:
        raise ConfigError(f"malformed --lambda {args.lam!r}") from None
    if args.order is not None and args.order != lambdas.order:
        raise ConfigError(f"--order {args.order} but --lambda has {len(lambdas)} entries")
    dataset = load_labelled(args.data, args.interval_end, args.grid_nodes or 256)
    model = fit(dataset, lambdas)
    manifest.outputs.append(str(save_model(model, manifest.output_dir)))
    logger.info("fitted %s on %d samples (%s path)", lambdas.label(), dataset.n, model.method)
    return 0


def run_aggregate(manifest: RunManifest, args: argparse.Namespace) -> int:
    if not args.data:
        raise ConfigError("aggregate needs --data PATH")
    order = args.order if args.order is not None else 1
    grid_text = args.lambda_grid or "1e-2,1e-1,1"
    lambdas = parse_lambda_grid(grid_text, order)
    dataset = load_labelled(args.data, args.interval_end, args.grid_nodes or 256)
    holdout = None
    if args.holdout:
        holdout = read_wide_csv(args.holdout, dataset.grid)
    models = fit_grid(dataset, lambdas)
    agg = aggregate(models, dataset, holdout)
    manifest.outputs.extend(str(p) for p in write_report(agg, dataset, manifest.output_dir))
    return 0


def run_predict(manifest: RunManifest, args: argparse.Namespace) -> int:
    if not args.model or not args.data:
        raise ConfigError("predict needs --model PATH and --data PATH")
    model = load_model(args.model)
    data = read_wide_csv(args.data, model.training.grid)
    predictions = model.predict_many(data.samples)
    path = manifest.output_dir / "predictions.csv"
    with path.open("w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(["id", "prediction"])
        for sample, value in zip(data.samples, predictions):
            writer.writerow([sample.id, format(value, ".17g")])
    manifest.outputs.append(str(path))
    return 0


# ── Entry point ─────────────────────────────────────────────────────────


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="polyfreg", description=__doc__.splitlines()[0])
    parser.add_argument("command", choices=COMMANDS)
    parser.add_argument("--config", type=Path, help="flat key = value config file")
    parser.add_argument("--seed", type=int)
    parser.add_argument("--threads", type=int)
    parser.add_argument("--out", type=Path, default=Path("."))
    parser.add_argument("--log-level")
    parser.add_argument("--n-max", type=int)
    parser.add_argument("--order", type=int, choices=(1, 2))
    parser.add_argument("--lambda-grid", help="per-degree lists: 'a,b,c' or 'a,b;c;d'")
    parser.add_argument("--runs", type=int)
    parser.add_argument("--threshold", type=float)
    parser.add_argument("--grid-nodes", type=int)
    parser.add_argument("--interval-end", type=float)
    parser.add_argument("--synthetic-surrogate", action="store_true")
    parser.add_argument("--data", type=Path)
    parser.add_argument("--holdout", type=Path, help="aggregation data (wide CSV)")
    parser.add_argument("--lambda", dest="lam", help="l0,l1,... for fit")
    parser.add_argument("--model", type=Path, help="model.json written by fit")
    return parser


def _overrides(args: argparse.Namespace) -> dict[str, object]:
    """Flag values under their config keys; the section follows the command."""
    section = "eval" if args.command == "evaluate" else "toy"
    overrides: dict[str, object] = {"seed": args.seed, "threads": args.threads}
    if section == "toy":
        overrides.update({"toy.n_max": args.n_max, "toy.grid_nodes": args.grid_nodes})
        if args.order is not None:
            overrides["toy.order"] = args.order
    else:
        overrides.update(
            {
                "eval.order": args.order,
                "eval.runs": args.runs,
                "eval.threshold": args.threshold,
                "eval.grid_nodes": args.grid_nodes,
                "eval.interval_end": args.interval_end,
            }
        )
    if args.lambda_grid is not None:
        overrides[f"{section}.lambda_grid"] = args.lambda_grid
    return overrides


def configure_logging(level: str | None) -> None:
    level = (level or os.environ.get(LOG_LEVEL_ENV) or "INFO").upper()
    if not isinstance(logging.getLevelName(level), int):
        raise ConfigError(f"unknown log level {level!r}")
    logging.basicConfig(level=level, format="[%(name)s] %(message)s", force=True)
    logging.captureWarnings(True)


def main(argv: Sequence[str] | None = None) -> int:
    load_dotenv()
    args = build_parser().parse_args(argv)
    started = time.perf_counter()
    try:
        configure_logging(args.log_level)
        file_values = load_config_file(args.config) if args.config else {}
        resolved = merge(file_values, _overrides(args))
        manifest = RunManifest(
            command=args.command,
            output_dir=args.out,
            config_path=args.config,
            overrides={k: str(v) for k, v in _overrides(args).items() if v is not None},
            seed=int(resolved.get("seed", 0)),
            threads=threads_from(resolved, default_threads),
            resolved=resolved,
        )
        manifest.output_dir.mkdir(parents=True, exist_ok=True)
        handlers = {
            "toy-curve": lambda: run_toy_curve(manifest),
            "evaluate": lambda: run_evaluate(manifest, args),
            "fit": lambda: run_fit(manifest, args),
            "aggregate": lambda: run_aggregate(manifest, args),
            "predict": lambda: run_predict(manifest, args),
        }
        try:
            status = handlers[args.command]()
        finally:
            manifest.write(time.perf_counter() - started)
    except PolyfregError as e:
        logger.error("%s", e)
        return e.exit_code
    except ValueError as e:
        logger.error("%s", e)
        return ConfigError.exit_code
    except OSError as e:
        logger.error("%s", e)
        return ConfigError.exit_code
    return status


if __name__ == "__main__":
    sys.exit(main())
