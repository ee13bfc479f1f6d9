"""Command-line front end.

Subcommands cover the whole workflow: synth, split, calibrate, predict,
evaluate, sweep, raster-apply. Exit codes: 0 success, 1 usage error,
2 data or validation error, 3 internal error. Diagnostics go to stderr;
declared output files receive data and nothing else, and rerunning a
command with the same inputs reproduces its outputs byte for byte.
"""

from __future__ import annotations

import argparse
import json
import math
import os
import sys

from . import __version__
from .calibration import (
    CalibratedClassifier,
    CalibratedRegressor,
    calibrate_abs_regressor,
    calibrate_cqr,
    calibrate_lac,
    calibrate_mondrian,
    load_model,
    save_model,
)
from .core import ConfidenceSpec, LabeledExample, RegressionExample, validate_probability_vector
from .datasets import (
    SyntheticClassSpec,
    SyntheticRegSpec,
    circle_means,
    gen_class_mixture,
    gen_heteroscedastic_reg,
    grouped_split,
    random_split,
    spatial_cluster_folds,
)
from .errors import CpkitError, LengthMismatch, ValidationError
from .evaluation import (
    efficiency_report,
    empirical_coverage_intervals,
    empirical_coverage_sets,
    format_threshold_table,
    sweep_thresholds,
)
from .prediction import (
    PredictionInterval,
    PredictionSet,
    predict_interval_abs,
    predict_interval_cqr,
    predict_set,
)
from .raster import apply_classifier_to_grid, read_grid, summarize_grid, write_uncertainty_grids
from .tabular import Table, read_table, write_table


class UsageError(Exception):
    """Bad flags or flag values; maps to exit code 1."""


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


# --- flag value types -------------------------------------------------------

def _unit_open(s: str) -> float:
    try:
        v = float(s)
    except ValueError:
        raise argparse.ArgumentTypeError(f"{s!r} is not a number") from None
    if not 0.0 < v < 1.0:
        raise argparse.ArgumentTypeError(f"must be in (0, 1), got {s}")
    return v


def _positive_int(s: str) -> int:
    try:
        v = int(s)
    except ValueError:
        raise argparse.ArgumentTypeError(f"{s!r} is not an integer") from None
    if v < 1:
        raise argparse.ArgumentTypeError(f"must be >= 1, got {s}")
    return v


def _positive_float(s: str) -> float:
    try:
        v = float(s)
    except ValueError:
        raise argparse.ArgumentTypeError(f"{s!r} is not a number") from None
    if not (math.isfinite(v) and v > 0):
        raise argparse.ArgumentTypeError(f"must be a positive number, got {s}")
    return v


def _csv_floats(s: str) -> tuple[float, ...]:
    try:
        return tuple(float(p) for p in s.split(","))
    except ValueError:
        raise argparse.ArgumentTypeError(f"{s!r} is not a comma-separated list of numbers") from None


def _csv_names(s: str) -> tuple[str, ...]:
    return tuple(p for p in s.split(",") if p)


def _resolve_alpha(args) -> float:
    if args.alpha is not None:
        return args.alpha
    return ConfidenceSpec(args.confidence).alpha


def _add_alpha_flags(p: _Parser) -> None:
    g = p.add_mutually_exclusive_group(required=True)
    g.add_argument("--alpha", type=_unit_open, help="miscoverage tolerance in (0, 1)")
    g.add_argument("--confidence", type=_unit_open, help="target coverage in (0, 1)")


def _add_partition_flags(p: _Parser) -> None:
    p.add_argument("--partition", help="keep only rows whose partition column equals this value")
    p.add_argument("--partition-col", default="partition", help="partition column name (default: partition)")


def _add_class_column_flags(p: _Parser) -> None:
    p.add_argument("--label-col", default="label", help="true label column (default: label)")
    p.add_argument("--prob-prefix", default="prob_",
                   help="prefix of per-class probability columns (default: prob_)")
    p.add_argument("--sum-tolerance", type=_positive_float, default=1e-3,
                   help="allowed |sum - 1| per probability row (default: 1e-3)")


# --- shared table handling ----------------------------------------------------

def _filtered(table: Table, args) -> Table:
    if getattr(args, "partition", None) is None:
        return table
    idx = table.column_index(args.partition_col)
    rows = [row for row in table.rows if row[idx] == args.partition]
    if not rows:
        raise ValidationError(
            f"{table.source}: no rows with {args.partition_col} == {args.partition!r}"
        )
    return Table(columns=table.columns, rows=rows, source=table.source)


def _prob_columns(table: Table, prefix: str) -> list[str]:
    cols = table.prefixed_columns(prefix)
    if len(cols) < 2:
        raise ValidationError(
            f"{table.source}: found {len(cols)} columns with prefix {prefix!r}, need at least 2"
        )
    return cols


def _labeled_examples(table: Table, args) -> tuple[list[LabeledExample], tuple[str, ...]]:
    prob_cols = _prob_columns(table, args.prob_prefix)
    class_names = tuple(c[len(args.prob_prefix):] for c in prob_cols)
    labels = table.int_column(args.label_col)
    prob_data = [table.float_column(c) for c in prob_cols]
    examples = []
    for r in range(len(table.rows)):
        try:
            probs = validate_probability_vector(
                (col[r] for col in prob_data), tolerance=args.sum_tolerance
            )
            examples.append(LabeledExample(probs=probs, label=labels[r]))
        except ValidationError as e:
            raise ValidationError(f"{table.source}: row {r}: {e}") from e
    return examples, class_names


def _write_json(path: str, doc) -> None:
    with open(path, "w", encoding="utf-8", newline="\n") as f:
        f.write(json.dumps(doc, indent=2, allow_nan=False) + "\n")


def _group_tag(i: int, n: int, group_count: int) -> str:
    width = len(str(group_count - 1))
    return f"g{i * group_count // n:0{width}d}"


# --- subcommands ---------------------------------------------------------------

def _cmd_synth(args) -> int:
    if args.task == "class":
        weights = args.weights
        if weights is None:
            weights = tuple(1.0 / args.classes for _ in range(args.classes))
        if len(weights) != args.classes:
            raise UsageError(
                f"--weights has {len(weights)} entries for --classes {args.classes}"
            )
        spec = SyntheticClassSpec(
            means=circle_means(args.classes, radius=args.radius, dimension=args.dim),
            sigma=args.sigma,
            weights=weights,
            temperature=args.temperature,
            seed=args.seed,
        )
        samples = gen_class_mixture(spec, args.n)
        columns = [f"x{j}" for j in range(args.dim)] + ["label"]
        columns += [f"prob_{c}" for c in range(args.classes)]
        if args.groups:
            columns.append("group")
        rows = []
        for i, s in enumerate(samples):
            row = list(s.features) + [s.label] + list(s.probs.values)
            if args.groups:
                row.append(_group_tag(i, args.n, args.groups))
            rows.append(row)
    else:
        lo, hi = _check_levels(args.levels)
        spec = SyntheticRegSpec(
            mean_fn=args.mean_fn,
            noise_fn=args.noise_fn,
            noise_scale=args.noise_scale,
            seed=args.seed,
        )
        samples = gen_heteroscedastic_reg(spec, args.n, levels=(lo, hi))
        columns = ["x", "y", "y_hat", "q_lo", "q_hi"]
        if args.groups:
            columns.append("group")
        rows = []
        for i, s in enumerate(samples):
            row = [s.x, s.y, s.y_hat, s.q_lo, s.q_hi]
            if args.groups:
                row.append(_group_tag(i, args.n, args.groups))
            rows.append(row)
    write_table(args.out, columns, rows)
    print(f"wrote {len(rows)} rows to {args.out}", file=sys.stderr)
    return 0


def _check_levels(levels: tuple[float, ...]) -> tuple[float, float]:
    if len(levels) != 2 or not 0.0 < levels[0] < levels[1] < 1.0:
        raise UsageError(f"--levels must be lo,hi with 0 < lo < hi < 1, got {levels}")
    return levels[0], levels[1]


def _part_names(count: int, names) -> tuple[str, ...]:
    if names is not None:
        if len(names) != count:
            raise UsageError(f"--names has {len(names)} entries for {count} parts")
        return names
    if count == 2:
        return ("calibration", "test")
    if count == 3:
        return ("train", "calibration", "test")
    return tuple(f"part{i}" for i in range(count))


def _cmd_split(args) -> int:
    table = read_table(args.input)
    n = len(table.rows)
    if args.spatial_folds is not None:
        if args.coord_cols is None:
            raise UsageError("--spatial-folds requires --coord-cols")
        coords_cols = [table.float_column(c) for c in args.coord_cols]
        coords = list(zip(*coords_cols))
        assignment = spatial_cluster_folds(coords, args.spatial_folds, args.seed)
        out_col, values = "fold", [str(a) for a in assignment.assignments]
    else:
        if args.group_col is not None:
            assignment = grouped_split(table.column(args.group_col), args.proportions, args.seed)
        else:
            assignment = random_split(n, args.proportions, args.seed)
        names = _part_names(assignment.part_count, args.names)
        out_col, values = "partition", [names[a] for a in assignment.assignments]
    if out_col in table.columns:
        raise ValidationError(f"{args.input}: column {out_col!r} already present")
    write_table(
        args.out,
        table.columns + [out_col],
        [row + [v] for row, v in zip(table.rows, values)],
    )
    print(f"wrote {n} rows to {args.out}", file=sys.stderr)
    return 0


def _cmd_calibrate(args) -> int:
    alpha = _resolve_alpha(args)
    table = _filtered(read_table(args.input), args)
    if args.method in ("lac", "mondrian"):
        examples, class_names = _labeled_examples(table, args)
        bad = [ex for ex in examples if ex.label >= len(class_names)]
        if bad:
            raise ValidationError(
                f"{table.source}: labels exceed the {len(class_names)} probability columns"
            )
        fn = calibrate_lac if args.method == "lac" else calibrate_mondrian
        model = fn(examples, alpha, class_names=class_names, created_at=args.timestamp)
    elif args.method == "abs":
        ys = table.float_column(args.y_col)
        yhats = table.float_column(args.yhat_col)
        examples = [RegressionExample(y=y, y_hat=yh) for y, yh in zip(ys, yhats)]
        model = calibrate_abs_regressor(examples, alpha, created_at=args.timestamp)
    else:
        ys = table.float_column(args.y_col)
        qlos = table.float_column(args.qlo_col)
        qhis = table.float_column(args.qhi_col)
        examples = []
        for r, (y, lo, hi) in enumerate(zip(ys, qlos, qhis)):
            try:
                examples.append(RegressionExample(y=y, q_lo=lo, q_hi=hi))
            except ValidationError as e:
                raise ValidationError(f"{table.source}: row {r}: {e}") from e
        model = calibrate_cqr(
            examples, alpha, lo_level=args.lo_level, hi_level=args.hi_level,
            created_at=args.timestamp,
        )
    save_model(model, args.out)
    print(
        f"calibrated {model.method} on {model.n_cal} rows at alpha={model.alpha!r}, wrote {args.out}",
        file=sys.stderr,
    )
    if model.insufficient:
        print(
            "warning: calibration set too small for this confidence; "
            "predictions will degrade to full sets or unbounded intervals",
            file=sys.stderr,
        )
    return 0


def _load_classifier(path: str) -> CalibratedClassifier:
    model = load_model(path)
    if not isinstance(model, CalibratedClassifier):
        raise ValidationError(f"{path}: expected a classifier artifact, got method {model.method!r}")
    return model


def _cmd_predict(args) -> int:
    model = load_model(args.model)
    table = _filtered(read_table(args.input), args)
    if isinstance(model, CalibratedClassifier):
        prob_cols = _prob_columns(table, args.prob_prefix)
        names = tuple(c[len(args.prob_prefix):] for c in prob_cols)
        if names != model.class_names:
            raise ValidationError(
                f"{table.source}: probability columns {names} do not match model classes {model.class_names}"
            )
        prob_data = [table.float_column(c) for c in prob_cols]
        columns = ["instance_id", "set_bitmask", "set_length", "included_classes"]
        rows = []
        for r in range(len(table.rows)):
            try:
                probs = validate_probability_vector(
                    (col[r] for col in prob_data), tolerance=args.sum_tolerance
                )
            except ValidationError as e:
                raise ValidationError(f"{table.source}: row {r}: {e}") from e
            pset = predict_set(model, probs, force_nonempty=args.force_nonempty)
            included = ";".join(model.class_names[c] for c in pset.class_indices())
            rows.append([r, pset.membership, pset.length, included])
    else:
        if model.method == "abs_residual":
            yhats = table.float_column(args.yhat_col)
            intervals = [predict_interval_abs(model, yh) for yh in yhats]
        else:
            qlos = table.float_column(args.qlo_col)
            qhis = table.float_column(args.qhi_col)
            intervals = []
            for r, (lo, hi) in enumerate(zip(qlos, qhis)):
                try:
                    intervals.append(predict_interval_cqr(model, lo, hi))
                except ValidationError as e:
                    raise ValidationError(f"{table.source}: row {r}: {e}") from e
        columns = ["instance_id", "lower", "upper", "width", "collapsed"]
        rows = [
            [r, iv.lower, iv.upper, iv.width, iv.collapsed]
            for r, iv in enumerate(intervals)
        ]
    write_table(args.out, columns, rows)
    print(f"wrote {len(rows)} predictions to {args.out}", file=sys.stderr)
    return 0


def _parse_bool(s: str, source: str, row: int) -> bool:
    if s == "true":
        return True
    if s == "false":
        return False
    raise ValidationError(f"{source}: row {row}: expected true/false, got {s!r}")


def _cmd_evaluate(args) -> int:
    preds = read_table(args.predictions)
    data = _filtered(read_table(args.data), args)
    model = load_model(args.model) if args.model else None
    groups = data.column(args.group_col) if args.group_col else None

    if "set_bitmask" in preds.columns:
        labels = data.int_column(args.label_col)
        if len(preds.rows) != len(labels):
            raise LengthMismatch(
                f"{args.predictions} has {len(preds.rows)} rows, {args.data} has {len(labels)}"
            )
        masks = preds.int_column("set_bitmask")
        stated = preds.int_column("set_length")
        if isinstance(model, CalibratedClassifier):
            class_count = model.class_count
        else:
            class_count = max(
                max(labels) + 1, max((m.bit_length() for m in masks), default=1), 1
            )
        sets = []
        for r, (m, ln) in enumerate(zip(masks, stated)):
            if m.bit_count() != ln:
                raise ValidationError(
                    f"{args.predictions}: row {r}: set_length {ln} does not match bitmask {m}"
                )
            sets.append(PredictionSet(membership=m, class_count=class_count))
        cov = empirical_coverage_sets(sets, labels, groups=groups)
        eff = efficiency_report(sets, class_count=class_count)
        metrics = {
            "task": "classification",
            "coverage": cov.coverage,
            "mean_set_size": eff.mean_set_size,
            "empty_set_fraction": eff.empty_set_fraction,
            "full_set_fraction": eff.full_set_fraction,
        }
    else:
        ys = data.float_column(args.y_col)
        if len(preds.rows) != len(ys):
            raise LengthMismatch(
                f"{args.predictions} has {len(preds.rows)} rows, {args.data} has {len(ys)}"
            )
        lowers = preds.float_column("lower")
        uppers = preds.float_column("upper")
        flags = preds.column("collapsed")
        intervals = [
            PredictionInterval(lower=lo, upper=hi, collapsed=_parse_bool(fl, args.predictions, r))
            for r, (lo, hi, fl) in enumerate(zip(lowers, uppers, flags))
        ]
        cov = empirical_coverage_intervals(intervals, ys, groups=groups)
        eff = efficiency_report(intervals)
        metrics = {
            "task": "regression",
            "coverage": cov.coverage,
            "mean_interval_width": eff.mean_interval_width,
        }

    doc = dict(metrics)
    doc["standard_error"] = cov.standard_error
    doc["n"] = cov.n
    doc["alpha"] = model.alpha if model else None
    doc["method"] = model.method if model else None
    if cov.group_count is not None:
        doc["groups"] = {
            "count": cov.group_count,
            "se_estimator": "stddev(group means, ddof=1) / sqrt(group count)",
            "per_group_coverage": dict(sorted(cov.per_group.items())),
        }
    else:
        doc["groups"] = None

    if args.format == "json":
        _write_json(args.out, doc)
    else:
        rows = []
        for key, value in doc.items():
            if key == "groups":
                if value is None:
                    rows.append([key, ""])
                else:
                    rows.append(["group_count", value["count"]])
            elif value is None:
                rows.append([key, ""])
            else:
                rows.append([key, value])
        write_table(args.out, ["metric", "value"], rows)
    print(
        f"coverage {cov.coverage!r} over {cov.n} instances, wrote {args.out}",
        file=sys.stderr,
    )
    return 0


def _cmd_sweep(args) -> int:
    table = _filtered(read_table(args.input), args)
    examples, _ = _labeled_examples(table, args)
    confs = args.confidences
    for c in confs:
        if not 0.0 < c < 1.0:
            raise UsageError(f"--confidences entries must be in (0, 1), got {c}")
    result = sweep_thresholds(examples, confs)
    if args.format == "json":
        doc = {
            "n_cal": result.n_cal,
            "rows": [
                {"confidence": r.confidence, "q_hat": r.q_hat, "p_threshold": r.p_threshold}
                for r in result.rows
            ],
        }
        _write_json(args.out, doc)
    else:
        with open(args.out, "w", encoding="utf-8", newline="\n") as f:
            f.write(format_threshold_table(result, full=args.full))
    print(f"swept {len(result.rows)} confidence levels on {result.n_cal} rows, wrote {args.out}",
          file=sys.stderr)
    return 0


def _cmd_raster_apply(args) -> int:
    model = _load_classifier(args.model)
    grid = read_grid(args.grid)
    workers = args.workers if args.workers is not None else (os.cpu_count() or 1)
    result = apply_classifier_to_grid(
        model, grid, workers=workers, sum_tolerance=args.sum_tolerance
    )
    write_uncertainty_grids(result, args.out_length, args.out_membership)
    total = grid.header.width * grid.header.height
    try:
        summary = summarize_grid(result)
        print(
            f"applied {model.method} to {total} pixels: {summary.valid_pixels} valid, "
            f"{summary.nodata_pixels} nodata, {result.simplex_violations} simplex violations; "
            f"mean set size {summary.efficiency.mean_set_size!r}",
            file=sys.stderr,
        )
    except CpkitError:
        print(
            f"applied {model.method} to {total} pixels: 0 valid "
            f"({result.simplex_violations} simplex violations)",
            file=sys.stderr,
        )
    return 0


# --- parser ---------------------------------------------------------------------

def build_parser() -> _Parser:
    parser = _Parser(prog="cpkit", description=__doc__)
    parser.add_argument("--version", action="version", version=f"cpkit {__version__}")
    parser.set_defaults(func=None)
    sub = parser.add_subparsers(dest="command")

    p = sub.add_parser("synth", help="generate synthetic data with oracle outputs")
    p.add_argument("--task", choices=("class", "reg"), required=True)
    p.add_argument("--n", type=_positive_int, required=True)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", required=True)
    p.add_argument("--groups", type=int, default=0,
                   help="emit a group column with this many block groups (0 = none)")
    p.add_argument("--classes", type=_positive_int, default=5)
    p.add_argument("--dim", type=_positive_int, default=2)
    p.add_argument("--sigma", type=_positive_float, default=1.0)
    p.add_argument("--radius", type=_positive_float, default=3.0)
    p.add_argument("--temperature", type=_positive_float, default=1.0)
    p.add_argument("--weights", type=_csv_floats, default=None)
    p.add_argument("--mean-fn", choices=("sinusoid", "piecewise_linear", "linear"),
                   default="sinusoid")
    p.add_argument("--noise-fn", choices=("constant", "increasing"), default="increasing")
    p.add_argument("--noise-scale", type=_positive_float, default=1.0)
    p.add_argument("--levels", type=_csv_floats, default=(0.05, 0.95))
    p.set_defaults(func=_cmd_synth)

    p = sub.add_parser("split", help="assign rows to partitions or spatial folds")
    p.add_argument("--in", dest="input", required=True)
    p.add_argument("--out", required=True)
    p.add_argument("--proportions", type=_csv_floats, default=(0.65, 0.2, 0.15))
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--group-col", default=None,
                   help="assign whole groups from this column instead of rows")
    p.add_argument("--spatial-folds", type=_positive_int, default=None,
                   help="emit a fold column from k-means on --coord-cols")
    p.add_argument("--coord-cols", type=_csv_names, default=None)
    p.add_argument("--names", type=_csv_names, default=None,
                   help="partition names (default: train,calibration,test)")
    p.set_defaults(func=_cmd_split)

    p = sub.add_parser("calibrate", help="fit a conformal threshold and write the model artifact")
    p.add_argument("--method", choices=("lac", "mondrian", "abs", "cqr"), required=True)
    _add_alpha_flags(p)
    p.add_argument("--in", dest="input", required=True)
    p.add_argument("--out", required=True)
    _add_partition_flags(p)
    _add_class_column_flags(p)
    p.add_argument("--y-col", default="y")
    p.add_argument("--yhat-col", default="y_hat")
    p.add_argument("--qlo-col", default="q_lo")
    p.add_argument("--qhi-col", default="q_hi")
    p.add_argument("--lo-level", type=_unit_open, default=None)
    p.add_argument("--hi-level", type=_unit_open, default=None)
    p.add_argument("--timestamp", default=None,
                   help="created_at string for the artifact (omitted by default for reproducibility)")
    p.set_defaults(func=_cmd_calibrate)

    p = sub.add_parser("predict", help="apply a model artifact to a table")
    p.add_argument("--model", required=True)
    p.add_argument("--in", dest="input", required=True)
    p.add_argument("--out", required=True)
    _add_partition_flags(p)
    _add_class_column_flags(p)
    p.add_argument("--yhat-col", default="y_hat")
    p.add_argument("--qlo-col", default="q_lo")
    p.add_argument("--qhi-col", default="q_hi")
    p.add_argument("--force-nonempty", action="store_true",
                   help="replace empty sets by the top class (breaks coverage accounting)")
    p.set_defaults(func=_cmd_predict)

    p = sub.add_parser("evaluate", help="coverage and efficiency of predictions against truth")
    p.add_argument("--predictions", required=True)
    p.add_argument("--data", required=True)
    p.add_argument("--out", required=True)
    _add_partition_flags(p)
    p.add_argument("--label-col", default="label")
    p.add_argument("--y-col", default="y")
    p.add_argument("--group-col", default=None)
    p.add_argument("--model", default=None, help="model artifact, recorded in the report")
    p.add_argument("--format", choices=("json", "tsv"), default="json")
    p.set_defaults(func=_cmd_evaluate)

    p = sub.add_parser("sweep", help="thresholds across several confidence levels")
    p.add_argument("--in", dest="input", required=True)
    p.add_argument("--out", required=True)
    p.add_argument("--confidences", type=_csv_floats, required=True)
    _add_partition_flags(p)
    _add_class_column_flags(p)
    p.add_argument("--full", action="store_true",
                   help="include the score-scale quantile as its own column")
    p.add_argument("--format", choices=("tsv", "json"), default="tsv")
    p.set_defaults(func=_cmd_sweep)

    p = sub.add_parser("raster-apply", help="pixel-wise prediction sets over a probability grid")
    p.add_argument("--model", required=True)
    p.add_argument("--grid", required=True, help="base path of the <base>.json/<base>.bin pair")
    p.add_argument("--out-length", required=True)
    p.add_argument("--out-membership", required=True)
    p.add_argument("--workers", type=_positive_int, default=None,
                   help="thread count (default: available cores); output is identical for any value")
    p.add_argument("--sum-tolerance", type=_positive_float, default=1e-3)
    p.set_defaults(func=_cmd_raster_apply)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except UsageError as e:
        print(f"error: {e}", file=sys.stderr)
        return 1
    except SystemExit as e:
        return int(e.code or 0)
    if args.func is None:
        print("error: no subcommand given (see cpkit --help)", file=sys.stderr)
        return 1
    try:
        return args.func(args)
    except UsageError as e:
        print(f"error: {e}", file=sys.stderr)
        return 1
    except (ValidationError, FileNotFoundError, IsADirectoryError, PermissionError) as e:
        print(f"error: {e}", file=sys.stderr)
        return 2
    except CpkitError as e:
        print(f"error: {e}", file=sys.stderr)
        return 2
    except OSError as e:
        print(f"error: {e}", file=sys.stderr)
        return 2
    except Exception as e:  # anything else is a bug, not bad data
        print(f"internal error: {type(e).__name__}: {e}", file=sys.stderr)
        return 3


if __name__ == "__main__":
    sys.exit(main())
