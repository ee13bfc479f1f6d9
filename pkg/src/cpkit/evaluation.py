"""Coverage and efficiency metrics, plus the confidence sweep.

Coverage is the plain fraction of instances whose prediction set or
interval contains the truth. When instances cluster (all pixels of one
image, all plots of one site), the reported standard error comes from
group means, not instance counts, so it is not flattered by
within-group correlation.
"""

from __future__ import annotations

import math
import statistics
from dataclasses import dataclass

from .core import corrected_rank
from .errors import (
    EmptyCalibration,
    EmptyInput,
    FewerThanTwoGroups,
    LengthMismatch,
    ValidationError,
)
from .prediction import PredictionInterval, PredictionSet
from .scores import score_calibration_set


@dataclass(frozen=True)
class CoverageReport:
    """Empirical coverage over n instances.

    ``standard_error``, ``group_count`` and ``per_group`` are present
    only when instance groups were supplied (and at least two distinct
    groups exist for the standard error).
    """

    coverage: float
    n: int
    standard_error: float | None = None
    group_count: int | None = None
    per_group: dict[str, float] | None = None


@dataclass(frozen=True)
class EfficiencyReport:
    """How informative predictions are, separate from whether they cover."""

    n: int
    mean_set_size: float | None = None
    empty_set_fraction: float | None = None
    full_set_fraction: float | None = None
    mean_interval_width: float | None = None
    standard_error: float | None = None


@dataclass(frozen=True)
class ThresholdRow:
    confidence: float
    q_hat: float
    p_threshold: float


@dataclass(frozen=True)
class ThresholdTable:
    """Per-confidence thresholds from one calibration set, highest first."""

    rows: tuple[ThresholdRow, ...]
    n_cal: int


def _group_means(values, groups) -> dict[str, float]:
    sums: dict[str, float] = {}
    counts: dict[str, int] = {}
    for v, g in zip(values, groups):
        key = str(g)
        sums[key] = sums.get(key, 0.0) + v
        counts[key] = counts.get(key, 0) + 1
    return {g: sums[g] / counts[g] for g in sums}


def grouped_standard_error(values, groups) -> tuple[float, float, dict[str, float]]:
    """Grand mean, group-mean standard error, and per-group means.

    The grand mean averages instances directly. The standard error is
    the sample standard deviation (ddof=1) of the G group means divided
    by sqrt(G), which treats groups, not instances, as the independent
    unit.

    Raises
    ------
    FewerThanTwoGroups
        With fewer than two distinct groups no spread is estimable.
    """
    values = [float(v) for v in values]
    groups = list(groups)
    if len(values) != len(groups):
        raise LengthMismatch(
            f"{len(values)} values but {len(groups)} group labels"
        )
    if not values:
        raise EmptyInput("no values to aggregate")
    per_group = _group_means(values, groups)
    if len(per_group) < 2:
        raise FewerThanTwoGroups(
            f"need at least 2 distinct groups, got {len(per_group)}"
        )
    grand_mean = math.fsum(values) / len(values)
    se = statistics.stdev(per_group.values()) / math.sqrt(len(per_group))
    return grand_mean, se, per_group


def _coverage_report(covered: list[bool], groups) -> CoverageReport:
    n = len(covered)
    coverage = sum(covered) / n
    if groups is None:
        return CoverageReport(coverage=coverage, n=n)
    groups = list(groups)
    if len(groups) != n:
        raise LengthMismatch(f"{n} instances but {len(groups)} group labels")
    vals = [1.0 if c else 0.0 for c in covered]
    per_group = _group_means(vals, groups)
    if len(per_group) >= 2:
        _, se, _ = grouped_standard_error(vals, groups)
    else:
        se = None
    return CoverageReport(
        coverage=coverage,
        n=n,
        standard_error=se,
        group_count=len(per_group),
        per_group=per_group,
    )


def empirical_coverage_sets(sets, labels, groups=None) -> CoverageReport:
    """Fraction of instances whose true label landed in the prediction set."""
    sets = list(sets)
    labels = list(labels)
    if len(sets) != len(labels):
        raise LengthMismatch(f"{len(sets)} sets but {len(labels)} labels")
    if not sets:
        raise EmptyInput("no prediction sets to evaluate")
    covered = [s.contains(lbl) for s, lbl in zip(sets, labels)]
    return _coverage_report(covered, groups)


def empirical_coverage_intervals(intervals, ys, groups=None) -> CoverageReport:
    """Fraction of instances with y inside [lower, upper], endpoints included."""
    intervals = list(intervals)
    ys = list(ys)
    if len(intervals) != len(ys):
        raise LengthMismatch(f"{len(intervals)} intervals but {len(ys)} targets")
    if not intervals:
        raise EmptyInput("no intervals to evaluate")
    covered = [iv.covers(y) for iv, y in zip(intervals, ys)]
    return _coverage_report(covered, groups)


def efficiency_report(predictions, class_count: int | None = None, groups=None) -> EfficiencyReport:
    """Mean set size / interval width and the empty / full set fractions.

    Dispatches on the element type: ``PredictionSet`` inputs produce the
    set metrics, ``PredictionInterval`` inputs the width metric. The
    optional ``groups`` argument adds a group-mean standard error on the
    per-instance size or width.
    """
    preds = list(predictions)
    if not preds:
        raise EmptyInput("no predictions to evaluate")
    n = len(preds)
    if isinstance(preds[0], PredictionSet):
        k = class_count if class_count is not None else preds[0].class_count
        sizes = [p.length for p in preds]
        se = None
        if groups is not None:
            _, se, _ = grouped_standard_error([float(s) for s in sizes], groups)
        return EfficiencyReport(
            n=n,
            mean_set_size=sum(sizes) / n,
            empty_set_fraction=sum(1 for p in preds if p.is_empty) / n,
            full_set_fraction=sum(1 for p in preds if p.length == k) / n,
            standard_error=se,
        )
    if isinstance(preds[0], PredictionInterval):
        widths = [p.width for p in preds]
        se = None
        if groups is not None:
            _, se, _ = grouped_standard_error(widths, groups)
        return EfficiencyReport(
            n=n,
            mean_interval_width=math.fsum(widths) / n,
            standard_error=se,
        )
    raise ValidationError(
        f"predictions must be PredictionSet or PredictionInterval, got {type(preds[0]).__name__}"
    )


def per_class_coverage(sets, labels, class_count: int) -> dict[int, CoverageReport]:
    """Coverage restricted to the instances of each true class.

    Classes with no instances are omitted rather than reported as NaN.
    """
    sets = list(sets)
    labels = list(labels)
    if len(sets) != len(labels):
        raise LengthMismatch(f"{len(sets)} sets but {len(labels)} labels")
    if not sets:
        raise EmptyInput("no prediction sets to evaluate")
    out: dict[int, CoverageReport] = {}
    for c in range(class_count):
        covered = [s.contains(c) for s, lbl in zip(sets, labels) if lbl == c]
        if covered:
            out[c] = CoverageReport(coverage=sum(covered) / len(covered), n=len(covered))
    return out


def sweep_thresholds(cal, confidences) -> ThresholdTable:
    """Thresholds for several confidence levels from one calibration set.

    Scores are computed and sorted once; each confidence then just picks
    its own order statistic, so a row is field-for-field identical to
    what a fresh single-level calibration at ``alpha = 1 - confidence``
    would produce. Rows come back ordered by descending confidence:
    as confidence falls, ``q_hat`` falls and ``p_threshold`` rises,
    trading coverage for smaller sets.
    """
    cal = list(cal)
    if not cal:
        raise EmptyCalibration("calibration set is empty")
    confs = [float(c) for c in confidences]
    if not confs:
        raise EmptyInput("no confidence levels given")
    for c in confs:
        if not 0.0 < c < 1.0:
            raise ValidationError(f"confidence must be in (0, 1), got {c}")
    ordered = sorted(score_calibration_set(cal, "hinge").scores)
    n = len(ordered)
    rows = []
    for c in sorted(confs, reverse=True):
        k = corrected_rank(n, 1.0 - c)
        q_hat = ordered[k - 1] if k <= n else math.inf
        rows.append(ThresholdRow(confidence=c, q_hat=q_hat, p_threshold=1.0 - q_hat))
    return ThresholdTable(rows=tuple(rows), n_cal=n)


def format_threshold_table(table: ThresholdTable, full: bool = False) -> str:
    """Render a sweep as a TSV text table.

    The default layout has two columns, confidence and qHat, where qHat
    is the probability threshold a class must reach to enter the set.
    With ``full=True`` the score-scale quantile is included as its own
    column.
    """
    if full:
        lines = ["confidence\tscore_q_hat\tp_threshold"]
        for r in table.rows:
            lines.append(f"{r.confidence!r}\t{r.q_hat!r}\t{r.p_threshold!r}")
    else:
        lines = ["confidence\tqHat"]
        for r in table.rows:
            lines.append(f"{r.confidence!r}\t{r.p_threshold!r}")
    return "\n".join(lines) + "\n"
