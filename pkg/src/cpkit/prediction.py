"""Applying calibrated models to new instances.

Classification yields a ``PredictionSet`` (a bitmask over class
indices, possibly empty, possibly the full set); regression yields a
``PredictionInterval``. Both are plain frozen values.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .calibration import CalibratedClassifier, CalibratedRegressor
from .core import ProbabilityVector
from .errors import (
    ClassCountMismatch,
    InsufficientCalibration,
    InvertedQuantiles,
    NonFinite,
    ValidationError,
)


@dataclass(frozen=True)
class PredictionSet:
    """A set of class indices packed as a bitmask (bit c = class c).

    The empty set is legal and meaningful: it signals that no class
    reached the calibrated threshold at this confidence.
    """

    membership: int
    class_count: int

    def __post_init__(self) -> None:
        if self.class_count < 1:
            raise ValidationError(f"class_count must be >= 1, got {self.class_count}")
        if not 0 <= self.membership < (1 << self.class_count):
            raise ValidationError(
                f"membership {self.membership} out of range for {self.class_count} classes"
            )

    @property
    def length(self) -> int:
        return self.membership.bit_count()

    def contains(self, c: int) -> bool:
        return 0 <= c < self.class_count and (self.membership >> c) & 1 == 1

    def class_indices(self) -> tuple[int, ...]:
        return tuple(c for c in range(self.class_count) if (self.membership >> c) & 1)

    @property
    def is_empty(self) -> bool:
        return self.membership == 0

    @property
    def is_full(self) -> bool:
        return self.membership == (1 << self.class_count) - 1


@dataclass(frozen=True)
class PredictionInterval:
    """A closed interval [lower, upper]; ``collapsed`` marks a degenerate one."""

    lower: float
    upper: float
    collapsed: bool = False

    def __post_init__(self) -> None:
        if self.lower > self.upper:
            raise ValidationError(
                f"interval lower {self.lower} exceeds upper {self.upper}"
            )

    @property
    def width(self) -> float:
        return self.upper - self.lower

    def covers(self, y: float) -> bool:
        return self.lower <= y <= self.upper


def _argmax_first(values) -> int:
    best, best_v = 0, values[0]
    for i, v in enumerate(values):
        if v > best_v:
            best, best_v = i, v
    return best


def _check_classifier(model: CalibratedClassifier, method: str, probs: ProbabilityVector):
    if not isinstance(model, CalibratedClassifier) or model.method != method:
        raise ValidationError(
            f"expected a calibrated {method!r} classifier, got {getattr(model, 'method', type(model).__name__)!r}"
        )
    if probs.class_count != model.class_count:
        raise ClassCountMismatch(
            f"probability vector has {probs.class_count} classes, model has {model.class_count}"
        )


def predict_set_lac(
    model: CalibratedClassifier,
    probs: ProbabilityVector,
    force_nonempty: bool = False,
) -> PredictionSet:
    """Include every class whose probability reaches the threshold.

    Membership test is ``p_c >= p_threshold`` with the inclusive
    comparison on the boundary. An insufficient model returns the full
    set. With ``force_nonempty`` an empty set is replaced by the single
    highest-probability class (first index on ties); coverage analyses
    should leave this off.

    Examples
    --------
    >>> from .calibration import CalibratedClassifier
    >>> m = CalibratedClassifier(
    ...     method="lac", alpha=0.1, n_cal=500, class_names=("a", "b", "c"),
    ...     q_hat=0.7, p_threshold=0.3, per_class=None, insufficient=False)
    >>> predict_set_lac(m, ProbabilityVector((0.5, 0.3, 0.2))).class_indices()
    (0, 1)
    """
    _check_classifier(model, "lac", probs)
    if model.insufficient:
        mask = (1 << model.class_count) - 1
    else:
        thr = model.p_threshold
        mask = 0
        for c, p in enumerate(probs.values):
            if p >= thr:
                mask |= 1 << c
    if force_nonempty and mask == 0:
        mask = 1 << _argmax_first(probs.values)
    return PredictionSet(membership=mask, class_count=model.class_count)


def predict_set_mondrian(
    model: CalibratedClassifier,
    probs: ProbabilityVector,
    force_nonempty: bool = False,
) -> PredictionSet:
    """Include class c when its hinge score ``1 - p_c`` is within q_hat[c].

    Classes calibrated as insufficient (absent or too small) are always
    included, which keeps the set conservative rather than silently
    dropping them.
    """
    _check_classifier(model, "mondrian", probs)
    mask = 0
    for c, p in enumerate(probs.values):
        entry = model.per_class[model.class_names[c]]
        if math.isinf(entry.q_hat) or (1.0 - p) <= entry.q_hat:
            mask |= 1 << c
    if force_nonempty and mask == 0:
        mask = 1 << _argmax_first(probs.values)
    return PredictionSet(membership=mask, class_count=model.class_count)


def predict_set(
    model: CalibratedClassifier,
    probs: ProbabilityVector,
    force_nonempty: bool = False,
) -> PredictionSet:
    """Dispatch to the lac or mondrian predictor by model method."""
    if model.method == "lac":
        return predict_set_lac(model, probs, force_nonempty)
    if model.method == "mondrian":
        return predict_set_mondrian(model, probs, force_nonempty)
    raise ValidationError(f"not a set-valued classifier method: {model.method!r}")


def predict_interval_abs(
    model: CalibratedRegressor, y_hat: float
) -> PredictionInterval:
    """Symmetric interval ``[y_hat - q_hat, y_hat + q_hat]``.

    Width is ``2 * q_hat`` for every instance; adaptivity requires the
    cqr route.
    """
    if not isinstance(model, CalibratedRegressor) or model.method != "abs_residual":
        raise ValidationError(
            f"expected a calibrated 'abs_residual' regressor, got {getattr(model, 'method', type(model).__name__)!r}"
        )
    if not math.isfinite(y_hat):
        raise NonFinite(f"y_hat must be finite, got {y_hat}")
    if model.insufficient or math.isinf(model.q_hat):
        raise InsufficientCalibration(
            f"n_cal={model.n_cal} cannot support alpha={model.alpha}; interval is unbounded"
        )
    return PredictionInterval(lower=y_hat - model.q_hat, upper=y_hat + model.q_hat)


def predict_interval_cqr(
    model: CalibratedRegressor, q_lo: float, q_hi: float
) -> PredictionInterval:
    """Adjusted band ``[q_lo - q_hat, q_hi + q_hat]``.

    A negative ``q_hat`` shrinks the band; if it shrinks past the point
    of inversion the interval collapses to the band midpoint and is
    flagged ``collapsed``.
    """
    if not isinstance(model, CalibratedRegressor) or model.method != "cqr":
        raise ValidationError(
            f"expected a calibrated 'cqr' regressor, got {getattr(model, 'method', type(model).__name__)!r}"
        )
    if not (math.isfinite(q_lo) and math.isfinite(q_hi)):
        raise NonFinite(f"quantile predictions must be finite, got {q_lo}, {q_hi}")
    if q_lo > q_hi:
        raise InvertedQuantiles(f"q_lo {q_lo} exceeds q_hi {q_hi}")
    if model.insufficient or math.isinf(model.q_hat):
        raise InsufficientCalibration(
            f"n_cal={model.n_cal} cannot support alpha={model.alpha}; interval is unbounded"
        )
    lower = q_lo - model.q_hat
    upper = q_hi + model.q_hat
    if lower > upper:
        mid = (q_lo + q_hi) / 2.0
        return PredictionInterval(lower=mid, upper=mid, collapsed=True)
    return PredictionInterval(lower=lower, upper=upper)
