"""Command-line experiment runner.

    qwalk run --config cfg.json [--experiment NAME] [--seed N] [--out DIR] [--format csv|json]
    qwalk list-experiments

The config file is one JSON document:

    {"experiment": "qrw",
     "parameters": {"scheme": "qrw2", "steps": 5},
     "output": {"path": "results", "format": "csv"},
     "seed": 7}

Each run writes a results table (results.csv or results.json), a metadata
record (meta.json with the resolved config, tool version and wall time),
and one whitespace-delimited .dat file per plottable series.  Exit status:
0 on success, 1 on configuration errors, 2 on numerical-guard errors.
"""

from __future__ import annotations

import argparse
import json
import sys
import time
from pathlib import Path

from . import __version__
from .errors import (
    ConfigError,
    DimensionBudgetError,
    NormalizationLostError,
    OverflowGuardError,
    QwalkError,
    ScalingInvalidError,
    StabilityBoundError,
    TruncationInadequateError,
)
from .experiments import EXPERIMENTS, ExperimentConfig, RunResult, run_experiment

_GUARD_ERRORS = (
    NormalizationLostError,
    DimensionBudgetError,
    TruncationInadequateError,
    StabilityBoundError,
    ScalingInvalidError,
    OverflowGuardError,
)


def _fmt(value) -> str:
    if isinstance(value, bool):
        return "1" if value else "0"
    if isinstance(value, float):
        return format(value, ".17g")
    return str(value)


def write_results_csv(result: RunResult, path: Path) -> None:
    lines = [",".join(result.columns)]
    for row in result.rows:
        lines.append(",".join(_fmt(v) for v in row))
    path.write_text("\n".join(lines) + "\n")


def write_results_json(result: RunResult, path: Path) -> None:
    payload = {"columns": result.columns, "rows": result.rows, "summary": result.summary}
    path.write_text(json.dumps(payload, indent=1, default=str) + "\n")


def emit_plot_data(result: RunResult, out_dir: Path) -> list[Path]:
    """Write one whitespace-delimited file per plottable series.

    Columns are x, y and an optional series label; an empty series still
    produces the header line.
    """
    written = []
    for name, (header, rows) in sorted(result.series.items()):
        path = out_dir / f"{name}.dat"
        lines = ["# " + " ".join(header)]
        for row in rows:
            lines.append(" ".join(_fmt(v) for v in row))
        path.write_text("\n".join(lines) + "\n")
        written.append(path)
    return written


def load_config(path: str | None, overrides: dict) -> ExperimentConfig:
    raw = {}
    if path is not None:
        try:
            raw = json.loads(Path(path).read_text())
        except FileNotFoundError:
            raise ConfigError(f"config: file not found: {path}")
        except json.JSONDecodeError as exc:
            raise ConfigError(f"config: invalid JSON ({exc})")
        if not isinstance(raw, dict):
            raise ConfigError("config: top level must be a JSON object")
    output = raw.get("output", {}) if isinstance(raw.get("output", {}), dict) else {}
    experiment = overrides.get("experiment") or raw.get("experiment")
    if experiment is None:
        raise ConfigError("experiment: required (config file or --experiment)")
    seed = overrides.get("seed")
    if seed is None:
        seed = raw.get("seed", 0)
    return ExperimentConfig(
        experiment=experiment,
        parameters=raw.get("parameters", {}),
        output_path=overrides.get("out") or output.get("path", "."),
        output_format=overrides.get("format") or output.get("format", "csv"),
        seed=int(seed),
    )


def run(config: ExperimentConfig) -> int:
    """Execute one experiment and write its artifacts; returns exit status 0."""
    start = time.perf_counter()
    result = run_experiment(config)
    out_dir = Path(config.output_path)
    out_dir.mkdir(parents=True, exist_ok=True)
    if config.output_format == "csv":
        write_results_csv(result, out_dir / "results.csv")
    else:
        write_results_json(result, out_dir / "results.json")
    emit_plot_data(result, out_dir)
    meta = {
        "experiment": config.experiment,
        "parameters": config.parameters,
        "seed": config.seed,
        "output_format": config.output_format,
        "version": __version__,
        "wall_time_s": time.perf_counter() - start,
        "summary": result.summary,
    }
    (out_dir / "meta.json").write_text(json.dumps(meta, indent=1, default=str) + "\n")
    return 0


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(prog="qwalk", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)
    runp = sub.add_parser("run", help="run one experiment from a JSON config")
    runp.add_argument("--config", help="path to the JSON config file")
    runp.add_argument("--experiment", choices=EXPERIMENTS, help="override the experiment name")
    runp.add_argument("--seed", type=int, help="override the RNG seed")
    runp.add_argument("--out", help="override the output directory")
    runp.add_argument("--format", choices=("csv", "json"), help="override the table format")
    sub.add_parser("list-experiments", help="print the available experiment names")
    args = parser.parse_args(argv)

    if args.command == "list-experiments":
        for name in EXPERIMENTS:
            print(name)
        return 0
    overrides = {
        "experiment": args.experiment,
        "seed": args.seed,
        "out": args.out,
        "format": args.format,
    }
    try:
        config = load_config(args.config, overrides)
        return run(config)
    except ConfigError as exc:
        print(f"configuration error: {exc}", file=sys.stderr)
        return 1
    except _GUARD_ERRORS as exc:
        print(f"numerical guard: {exc}", file=sys.stderr)
        return 2
    except QwalkError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
