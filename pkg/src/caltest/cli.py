"""Command-line interface: compute, compare, diagram, simulate, and sweep.

Input files are CSV with a ``prediction,label`` header (or a JSON array of
{"prediction": ..., "label": ...} objects). Every command writes a versioned
JSON report plus a plain-text table, and is deterministic given its
configuration and seed; no environment variables are consulted.
"""
from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

import numpy as np

from .binning import BinStrategy, build_bins
from .core import Dataset
from .diagram import build_diagram, render_svg
from .experiments import (
    METRIC_COLUMNS,
    SWEEP_PARAMETERS,
    BatteryConfig,
    metric_battery,
    run_sweep,
    simulate,
)
from .stattest import TestConfig

__all__ = [
    "IngestError",
    "EmptyInputError",
    "MalformedRowError",
    "PredictionRangeError",
    "LabelValueError",
    "ingest",
    "main",
]

SCHEMA_VERSION = 1

_NORM_FLAGS = {"wl1": "weighted_l1", "sup": "sup"}
_TEST_FLAGS = {"binomial": "binomial", "t": "t"}
_BIN_FLAGS = {
    "equispaced": "equispaced",
    "quantile": "quantile",
    "pava": "pava",
    "pava-bc": "pava_bc",
}


class IngestError(ValueError):
    """Base class for input-file problems."""


class EmptyInputError(IngestError):
    pass


class MalformedRowError(IngestError):
    pass


class PredictionRangeError(IngestError):
    pass


class LabelValueError(IngestError):
    pass


def _parse_record(raw_pred, raw_label, row: int) -> tuple[float, int]:
    try:
        pred = float(raw_pred)
    except (TypeError, ValueError):
        raise MalformedRowError(f"row {row}: prediction {raw_pred!r} is not a number") from None
    if not np.isfinite(pred) or not (0.0 <= pred <= 1.0):
        raise PredictionRangeError(f"row {row}: prediction {pred!r} outside [0, 1]")
    try:
        label_f = float(raw_label)
    except (TypeError, ValueError):
        raise MalformedRowError(f"row {row}: label {raw_label!r} is not a number") from None
    if label_f not in (0.0, 1.0):
        raise LabelValueError(f"row {row}: label {raw_label!r} must be 0 or 1")
    return pred, int(label_f)


def ingest(path: str | Path) -> Dataset:
    """Load and validate a prediction/label file, naming the offending row on error."""
    path = Path(path)
    text = path.read_text(encoding="utf-8")
    if not text.strip():
        raise EmptyInputError(f"{path}: file is empty")
    preds: list[float] = []
    labels: list[int] = []
    if path.suffix.lower() == ".json":
        try:
            records = json.loads(text)
        except json.JSONDecodeError as exc:
            raise MalformedRowError(f"{path}: invalid JSON ({exc})") from None
        if not isinstance(records, list) or not records:
            raise EmptyInputError(f"{path}: expected a non-empty JSON array")
        for row, record in enumerate(records, start=1):
            if not isinstance(record, dict) or "prediction" not in record or "label" not in record:
                raise MalformedRowError(f"row {row}: expected an object with prediction and label")
            pred, label = _parse_record(record["prediction"], record["label"], row)
            preds.append(pred)
            labels.append(label)
    else:
        lines = text.splitlines()
        header = lines[0].strip().lower()
        if header.replace(" ", "") != "prediction,label":
            raise MalformedRowError(f"{path}: expected header 'prediction,label', got {lines[0]!r}")
        data_lines = [ln for ln in lines[1:] if ln.strip()]
        if not data_lines:
            raise EmptyInputError(f"{path}: no data rows")
        for row, line in enumerate(data_lines, start=1):
            parts = line.split(",")
            if len(parts) != 2:
                raise MalformedRowError(f"row {row}: expected 'prediction,label', got {line!r}")
            pred, label = _parse_record(parts[0].strip(), parts[1].strip(), row)
            preds.append(pred)
            labels.append(label)
    return Dataset(np.array(preds), np.array(labels))


def write_dataset_csv(dataset: Dataset, path: Path) -> None:
    """Lossless CSV dump; re-ingesting reproduces identical metric values."""
    lines = ["prediction,label"]
    lines.extend(
        f"{p!r},{y}" for p, y in zip(dataset.predictions.tolist(), dataset.labels.tolist())
    )
    path.write_text("\n".join(lines) + "\n", encoding="utf-8")


def _json_safe(obj):
    if isinstance(obj, float) and not np.isfinite(obj):
        return None
    if isinstance(obj, dict):
        return {k: _json_safe(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_json_safe(v) for v in obj]
    return obj


def _write_report(out_dir: Path, stem: str, payload: dict, table: str) -> None:
    out_dir.mkdir(parents=True, exist_ok=True)
    body = json.dumps(_json_safe(payload), indent=2, sort_keys=True)
    (out_dir / f"{stem}.json").write_text(body + "\n", encoding="utf-8")
    (out_dir / f"{stem}.txt").write_text(table, encoding="utf-8")
    print(table, end="")


def _format_value(column: str, value) -> str:
    if value is None or (isinstance(value, float) and not np.isfinite(value)):
        return "n/a"
    if column.startswith("TCE"):
        return f"{value:.2f}"
    return f"{value:.4f}"


def _metrics_table(rows: list[tuple[str, dict]], label_header: str) -> str:
    width = max([len(label_header)] + [len(r[0]) for r in rows]) + 2
    header = label_header.ljust(width) + "".join(c.rjust(9) for c in METRIC_COLUMNS)
    lines = [header, "-" * len(header)]
    for label, values in rows:
        cells = "".join(_format_value(c, values.get(c)).rjust(9) for c in METRIC_COLUMNS)
        lines.append(label.ljust(width) + cells)
    return "\n".join(lines) + "\n"


def _battery_config(args) -> BatteryConfig:
    return BatteryConfig(
        test=TestConfig(_TEST_FLAGS[args.test], args.alpha),
        num_bins=args.B,
        nmin_frac=args.nmin_frac,
        nmax_frac=args.nmax_frac,
        norm=_NORM_FLAGS[args.norm],
    )


def _config_snapshot(args) -> dict:
    return {
        "bins": args.bins,
        "B": args.B,
        "nmin_frac": args.nmin_frac,
        "nmax_frac": args.nmax_frac,
        "alpha": args.alpha,
        "test": args.test,
        "norm": args.norm,
        "seed": args.seed,
    }


def cmd_compute(args) -> int:
    cfg = _battery_config(args)
    rows = []
    results = []
    for input_path in args.inputs:
        dataset = ingest(input_path)
        values = metric_battery(dataset, cfg)
        rows.append((str(input_path), values))
        results.append(
            {
                "input": str(input_path),
                "n": dataset.n,
                "prevalence": dataset.prevalence,
                "metrics": values,
            }
        )
    payload = {
        "schema_version": SCHEMA_VERSION,
        "kind": "compare" if len(args.inputs) > 1 else "compute",
        "config": _config_snapshot(args),
        "results": results,
    }
    _write_report(Path(args.out), "report", payload, _metrics_table(rows, "input"))
    return 0


def cmd_diagram(args) -> int:
    dataset = ingest(args.input)
    strategy = BinStrategy(
        kind=_BIN_FLAGS[args.bins],
        num_bins=args.B,
        nmin_frac=args.nmin_frac,
        nmax_frac=args.nmax_frac,
    )
    bins = build_bins(dataset, strategy)
    kind = "test_based" if args.kind == "test-based" else "standard"
    cfg = TestConfig(_TEST_FLAGS[args.test], args.alpha) if kind == "test_based" else None
    spec = build_diagram(dataset, bins, cfg, kind)

    out_dir = Path(args.out)
    out_dir.mkdir(parents=True, exist_ok=True)
    svg_path = out_dir / f"{Path(args.input).stem}_{args.kind}.svg"
    json_path = svg_path.with_suffix(".json")
    for target in (svg_path, json_path):
        if target.exists():
            raise FileExistsError(f"refusing to overwrite {target}")
    svg_path.write_text(render_svg(spec, args.width, args.height), encoding="utf-8")
    json_path.write_text(spec.to_json() + "\n", encoding="utf-8")
    print(f"wrote {svg_path}")
    print(f"wrote {json_path}")
    return 0


def _parse_pairs(text: str) -> list[tuple[float, float]]:
    pairs = []
    for chunk in text.split(","):
        left, _, right = chunk.partition(":")
        pairs.append((float(left), float(right)))
    return pairs


def cmd_simulate(args) -> int:
    cfg = _battery_config(args)
    pairs = _parse_pairs(args.pairs)
    results = simulate(
        pairs,
        n_seeds=args.n_seeds,
        n_train=args.n_train,
        n_test=args.n_test,
        base_seed=args.seed,
        cfg=cfg,
    )
    rows = []
    for entry in results:
        label = f"{entry['train_prevalence']:g} vs {entry['test_prevalence']:g}"
        rows.append((label, {c: entry["summary"][c]["mean"] for c in METRIC_COLUMNS}))
    payload = {
        "schema_version": SCHEMA_VERSION,
        "kind": "simulate",
        "config": {**_config_snapshot(args), "n_train": args.n_train,
                   "n_test": args.n_test, "n_seeds": args.n_seeds},
        "results": results,
    }
    out_dir = Path(args.out)
    _write_report(out_dir, "simulate", payload, _metrics_table(rows, "prevalence"))
    if args.dump_data:
        from .experiments import scenario_dataset

        for train_prev, test_prev in pairs:
            dataset = scenario_dataset(
                train_prev, test_prev, args.n_train, args.n_test, args.seed
            )
            name = f"scenario_{train_prev:g}_vs_{test_prev:g}_seed{args.seed}.csv"
            write_dataset_csv(dataset, out_dir / name)
    return 0


def _parse_grid(parameter: str, text: str) -> list:
    values = []
    for chunk in text.split(","):
        if parameter in ("binsize_range", "prevalence"):
            left, _, right = chunk.partition(":")
            values.append((float(left), float(right)))
        elif parameter == "test_kind":
            values.append(chunk.strip())
        else:
            values.append(float(chunk))
    return values


def cmd_sweep(args) -> int:
    cfg = _battery_config(args)
    grid = _parse_grid(args.parameter, args.grid)
    results = run_sweep(
        args.parameter,
        grid,
        n_seeds=args.n_seeds,
        n_train=args.n_train,
        n_test=args.n_test,
        base_seed=args.seed,
        cfg=cfg,
    )
    blocks = []
    for block in results:
        if block["train_prevalence"] is not None:
            blocks.append(
                f"scenario: train {block['train_prevalence']:g}"
                f" vs test {block['test_prevalence']:g}\n"
            )
        rows = []
        for point in block["points"]:
            label = str(point["value"])
            if "error" in point:
                rows.append((label, {}))
            else:
                rows.append((label, {c: point["summary"][c]["mean"] for c in METRIC_COLUMNS}))
        blocks.append(_metrics_table(rows, args.parameter))
    payload = {
        "schema_version": SCHEMA_VERSION,
        "kind": "sweep",
        "config": {**_config_snapshot(args), "parameter": args.parameter,
                   "n_train": args.n_train, "n_test": args.n_test, "n_seeds": args.n_seeds},
        "results": results,
    }
    _write_report(Path(args.out), "sweep", payload, "\n".join(blocks))
    return 0


def _read_config_file(path: str) -> dict[str, str]:
    """Flat key=value defaults; command-line flags override these."""
    overrides = {}
    for raw in Path(path).read_text(encoding="utf-8").splitlines():
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        key, sep, value = line.partition("=")
        if not sep:
            raise ValueError(f"config line {raw!r} is not key = value")
        overrides[key.strip().replace("-", "_")] = value.strip()
    return overrides


def _add_common_flags(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--config", help="flat key=value file with flag defaults")
    parser.add_argument("--bins", choices=sorted(_BIN_FLAGS), default="pava-bc")
    parser.add_argument("--B", type=int, default=10, help="bin count for equispaced/quantile")
    parser.add_argument("--nmin-frac", type=float, default=1 / 20, dest="nmin_frac")
    parser.add_argument("--nmax-frac", type=float, default=1 / 5, dest="nmax_frac")
    parser.add_argument("--alpha", type=float, default=0.05)
    parser.add_argument("--test", choices=sorted(_TEST_FLAGS), default="binomial")
    parser.add_argument("--norm", choices=sorted(_NORM_FLAGS), default="wl1")
    parser.add_argument("--seed", type=int, default=0)
    parser.add_argument("--out", default="caltest_out", help="output directory")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="caltest",
        description="Calibration error metrics for probabilistic binary classifiers.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p_compute = sub.add_parser("compute", help="metric battery for one prediction file")
    p_compute.add_argument("inputs", nargs=1, metavar="INPUT")
    _add_common_flags(p_compute)
    p_compute.set_defaults(func=cmd_compute)

    p_compare = sub.add_parser("compare", help="metric battery across several files")
    p_compare.add_argument("inputs", nargs="+", metavar="INPUT")
    _add_common_flags(p_compare)
    p_compare.set_defaults(func=cmd_compute)

    p_diagram = sub.add_parser("diagram", help="emit a reliability diagram (SVG + JSON)")
    p_diagram.add_argument("input", metavar="INPUT")
    p_diagram.add_argument("--kind", choices=["standard", "test-based"], default="test-based")
    p_diagram.add_argument("--width", type=int, default=640)
    p_diagram.add_argument("--height", type=int, default=480)
    _add_common_flags(p_diagram)
    p_diagram.set_defaults(func=cmd_diagram)

    p_sim = sub.add_parser("simulate", help="prevalence-shift scenarios on synthetic data")
    p_sim.add_argument(
        "--pairs",
        default="0.5:0.5,0.5:0.4,0.01:0.02",
        help="comma-separated train:test prevalence pairs",
    )
    p_sim.add_argument("--n-train", type=int, default=14000, dest="n_train")
    p_sim.add_argument("--n-test", type=int, default=6000, dest="n_test")
    p_sim.add_argument("--n-seeds", type=int, default=20, dest="n_seeds")
    p_sim.add_argument("--dump-data", action="store_true", dest="dump_data",
                       help="also write one scenario CSV per pair")
    _add_common_flags(p_sim)
    p_sim.set_defaults(func=cmd_simulate)

    p_sweep = sub.add_parser("sweep", help="sensitivity sweep of one parameter")
    p_sweep.add_argument("--parameter", choices=SWEEP_PARAMETERS, required=True)
    p_sweep.add_argument("--grid", required=True,
                         help="comma-separated values; use a:b for pairs")
    p_sweep.add_argument("--n-train", type=int, default=14000, dest="n_train")
    p_sweep.add_argument("--n-test", type=int, default=6000, dest="n_test")
    p_sweep.add_argument("--n-seeds", type=int, default=5, dest="n_seeds")
    _add_common_flags(p_sweep)
    p_sweep.set_defaults(func=cmd_sweep)
    return parser


_SWITCH_KEYS = {"dump_data"}


def _merge_config_argv(argv: list[str]) -> list[str]:
    """Inject config-file values as flags right after the subcommand.

    Explicit command-line flags appear later in argv and therefore override
    the injected ones.
    """
    path = None
    for i, token in enumerate(argv):
        if token == "--config" and i + 1 < len(argv):
            path = argv[i + 1]
            break
        if token.startswith("--config="):
            path = token.split("=", 1)[1]
            break
    if path is None or not argv:
        return argv
    injected: list[str] = []
    for key, value in _read_config_file(path).items():
        flag = "--" + key.replace("_", "-")
        if key in _SWITCH_KEYS:
            if value.lower() in ("1", "true", "yes"):
                injected.append(flag)
        else:
            injected.extend([flag, value])
    return [argv[0], *injected, *argv[1:]]


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    try:
        merged = _merge_config_argv(sys.argv[1:] if argv is None else list(argv))
        args = parser.parse_args(merged)
        return args.func(args)
    except (IngestError, FileExistsError, FileNotFoundError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
