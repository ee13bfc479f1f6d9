"""Calibration of set-valued classifiers and interval regressors.

Four methods share one JSON artifact schema: marginal classification
("lac"), class-conditional classification ("mondrian"), and the two
regression routes ("abs_residual", "cqr"). Fields a method does not use
are stored as null so one decoder serves all artifacts.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass

from .core import (
    ConformalQuantileResult,
    check_alpha,
    conformal_quantile,
)
from .errors import (
    ClassCountMismatch,
    EmptyCalibration,
    ValidationError,
)
from .scores import score_calibration_set

SCHEMA_VERSION = 1

CLASSIFIER_METHODS = ("lac", "mondrian")
REGRESSOR_METHODS = ("abs_residual", "cqr")


@dataclass(frozen=True)
class PerClassThreshold:
    """Calibration outcome for a single class under the mondrian method."""

    n: int
    q_hat: float
    p_threshold: float
    insufficient: bool


@dataclass(frozen=True)
class CalibratedClassifier:
    """A calibrated set-valued classifier.

    For ``method == "lac"`` the scalar ``q_hat``/``p_threshold`` apply to
    every class and ``per_class`` is ``None``. For ``method == "mondrian"``
    the scalars are ``None`` and ``per_class`` maps class name to its own
    threshold; the top-level ``insufficient`` flag is the OR over classes.

    ``p_threshold`` is ``1 - q_hat`` (so ``-inf`` when ``q_hat`` is
    ``+inf``): a class enters the prediction set when its probability
    reaches the threshold.
    """

    method: str
    alpha: float
    n_cal: int
    class_names: tuple[str, ...]
    q_hat: float | None
    p_threshold: float | None
    per_class: dict[str, PerClassThreshold] | None
    insufficient: bool
    created_at: str | None = None

    @property
    def class_count(self) -> int:
        return len(self.class_names)


@dataclass(frozen=True)
class CalibratedRegressor:
    """A calibrated interval regressor.

    ``quantile_lo_level``/``quantile_hi_level`` are the nominal levels of
    the underlying quantile model for "cqr" and ``None`` for
    "abs_residual". ``q_hat`` may be negative for "cqr" (the band
    shrinks) and is ``+inf`` when calibration was insufficient.
    """

    method: str
    alpha: float
    n_cal: int
    q_hat: float
    quantile_lo_level: float | None
    quantile_hi_level: float | None
    insufficient: bool
    created_at: str | None = None


def default_class_names(class_count: int) -> tuple[str, ...]:
    return tuple(str(i) for i in range(class_count))


def _resolve_class_names(class_names, class_count: int) -> tuple[str, ...]:
    if class_names is None:
        return default_class_names(class_count)
    names = tuple(str(n) for n in class_names)
    if len(names) != class_count:
        raise ClassCountMismatch(
            f"got {len(names)} class names for {class_count} classes"
        )
    if len(set(names)) != len(names):
        raise ValidationError(f"class names contain duplicates: {names}")
    return names


def _common_class_count(cal) -> int:
    class_count = cal[0].probs.class_count
    for i, ex in enumerate(cal):
        if ex.probs.class_count != class_count:
            raise ClassCountMismatch(
                f"example {i} has {ex.probs.class_count} classes, expected {class_count}"
            )
    return class_count


def calibrate_lac(
    cal, alpha: float, class_names=None, created_at: str | None = None
) -> CalibratedClassifier:
    """Calibrate a marginal set-valued classifier from hinge scores.

    Parameters
    ----------
    cal : sequence of LabeledExample
        Calibration instances; all must share a class count.
    alpha : float
        Miscoverage tolerance in (0, 1).
    class_names : sequence of str, optional
        Display names per class index; defaults to "0", "1", ...
    created_at : str, optional
        Timestamp recorded in the artifact. Left out by default so
        repeated runs produce byte-identical artifacts.

    Returns
    -------
    CalibratedClassifier
        With ``p_threshold = 1 - q_hat``; when the corrected rank
        exceeds ``n_cal`` the threshold is ``-inf`` and predictions
        degrade to full sets.
    """
    check_alpha(alpha)
    cal = list(cal)
    if not cal:
        raise EmptyCalibration("calibration set is empty")
    class_count = _common_class_count(cal)
    names = _resolve_class_names(class_names, class_count)
    cq = conformal_quantile(score_calibration_set(cal, "hinge").scores, alpha)
    return CalibratedClassifier(
        method="lac",
        alpha=alpha,
        n_cal=cq.n_cal,
        class_names=names,
        q_hat=cq.q_hat,
        p_threshold=1.0 - cq.q_hat,
        per_class=None,
        insufficient=cq.insufficient,
        created_at=created_at,
    )


def calibrate_mondrian(
    cal, alpha: float, class_names=None, created_at: str | None = None
) -> CalibratedClassifier:
    """Calibrate one threshold per true class (class-conditional coverage).

    Calibration scores are partitioned by true label and the corrected
    quantile runs independently inside each partition, so each class
    pays its own finite-sample correction against its own count. A class
    absent from calibration gets ``q_hat = inf`` (it is always included)
    and is flagged insufficient.
    """
    check_alpha(alpha)
    cal = list(cal)
    if not cal:
        raise EmptyCalibration("calibration set is empty")
    class_count = _common_class_count(cal)
    names = _resolve_class_names(class_names, class_count)
    by_class: list[list[float]] = [[] for _ in range(class_count)]
    for ex in cal:
        by_class[ex.label].append(1.0 - ex.probs.values[ex.label])
    per_class: dict[str, PerClassThreshold] = {}
    for c, scores in enumerate(by_class):
        if scores:
            cq: ConformalQuantileResult = conformal_quantile(scores, alpha)
            entry = PerClassThreshold(
                n=cq.n_cal,
                q_hat=cq.q_hat,
                p_threshold=1.0 - cq.q_hat,
                insufficient=cq.insufficient,
            )
        else:
            entry = PerClassThreshold(
                n=0, q_hat=math.inf, p_threshold=-math.inf, insufficient=True
            )
        per_class[names[c]] = entry
    return CalibratedClassifier(
        method="mondrian",
        alpha=alpha,
        n_cal=len(cal),
        class_names=names,
        q_hat=None,
        p_threshold=None,
        per_class=per_class,
        insufficient=any(e.insufficient for e in per_class.values()),
        created_at=created_at,
    )


def calibrate_abs_regressor(
    cal, alpha: float, created_at: str | None = None
) -> CalibratedRegressor:
    """Calibrate symmetric intervals ``y_hat ± q_hat`` from |y - y_hat|."""
    check_alpha(alpha)
    cal = list(cal)
    if not cal:
        raise EmptyCalibration("calibration set is empty")
    cq = conformal_quantile(score_calibration_set(cal, "abs_residual").scores, alpha)
    return CalibratedRegressor(
        method="abs_residual",
        alpha=alpha,
        n_cal=cq.n_cal,
        q_hat=cq.q_hat,
        quantile_lo_level=None,
        quantile_hi_level=None,
        insufficient=cq.insufficient,
        created_at=created_at,
    )


def calibrate_cqr(
    cal,
    alpha: float,
    lo_level: float | None = None,
    hi_level: float | None = None,
    created_at: str | None = None,
) -> CalibratedRegressor:
    """Calibrate quantile-band adjustments from the signed band score.

    ``lo_level``/``hi_level`` default to ``alpha/2`` and ``1 - alpha/2``,
    the symmetric split of the tolerance across the two tails. ``q_hat``
    may come out negative when the underlying quantile model is already
    conservative; intervals then shrink.
    """
    check_alpha(alpha)
    if lo_level is None:
        lo_level = alpha / 2.0
    if hi_level is None:
        hi_level = 1.0 - alpha / 2.0
    if not 0.0 < lo_level < hi_level < 1.0:
        raise ValidationError(
            f"quantile levels must satisfy 0 < lo < hi < 1, got {lo_level}, {hi_level}"
        )
    cal = list(cal)
    if not cal:
        raise EmptyCalibration("calibration set is empty")
    cq = conformal_quantile(score_calibration_set(cal, "cqr").scores, alpha)
    return CalibratedRegressor(
        method="cqr",
        alpha=alpha,
        n_cal=cq.n_cal,
        q_hat=cq.q_hat,
        quantile_lo_level=lo_level,
        quantile_hi_level=hi_level,
        insufficient=cq.insufficient,
        created_at=created_at,
    )


# --- artifact serialization ---------------------------------------------
#
# One schema for all methods:
#   {schema_version, method, alpha, n_cal, q_hat, p_threshold,
#    class_names, quantile_lo_level, quantile_hi_level, per_class,
#    insufficient, created_at}
# Infinities are the strings "inf" / "-inf"; unused fields are null.
# Finite floats go through json's repr round-trip, so decoding an
# encoded model reproduces every float bit for bit.


def _enc_float(x: float | None):
    if x is None:
        return None
    if math.isinf(x):
        return "inf" if x > 0 else "-inf"
    return x


def _dec_float(v, where: str) -> float | None:
    if v is None:
        return None
    if isinstance(v, str):
        if v not in ("inf", "-inf"):
            raise ValidationError(f"{where}: unexpected float string {v!r}")
        return float(v)
    if isinstance(v, bool) or not isinstance(v, (int, float)):
        raise ValidationError(f"{where}: expected a number, got {v!r}")
    return float(v)


def encode_model(model: CalibratedClassifier | CalibratedRegressor) -> str:
    """Serialize a calibrated model to its JSON artifact text."""
    if isinstance(model, CalibratedClassifier):
        doc = {
            "schema_version": SCHEMA_VERSION,
            "method": model.method,
            "alpha": model.alpha,
            "n_cal": model.n_cal,
            "q_hat": _enc_float(model.q_hat),
            "p_threshold": _enc_float(model.p_threshold),
            "class_names": list(model.class_names),
            "quantile_lo_level": None,
            "quantile_hi_level": None,
            "per_class": None
            if model.per_class is None
            else {
                name: {
                    "n": e.n,
                    "q_hat": _enc_float(e.q_hat),
                    "p_threshold": _enc_float(e.p_threshold),
                    "insufficient": e.insufficient,
                }
                for name, e in model.per_class.items()
            },
            "insufficient": model.insufficient,
            "created_at": model.created_at,
        }
    elif isinstance(model, CalibratedRegressor):
        doc = {
            "schema_version": SCHEMA_VERSION,
            "method": model.method,
            "alpha": model.alpha,
            "n_cal": model.n_cal,
            "q_hat": _enc_float(model.q_hat),
            "p_threshold": None,
            "class_names": None,
            "quantile_lo_level": model.quantile_lo_level,
            "quantile_hi_level": model.quantile_hi_level,
            "per_class": None,
            "insufficient": model.insufficient,
            "created_at": model.created_at,
        }
    else:
        raise ValidationError(f"cannot encode object of type {type(model).__name__}")
    return json.dumps(doc, indent=2, allow_nan=False) + "\n"


def decode_model(text: str) -> CalibratedClassifier | CalibratedRegressor:
    """Parse a model artifact, the exact inverse of :func:`encode_model`."""
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as e:
        raise ValidationError(f"model artifact is not valid JSON: {e}") from e
    if not isinstance(doc, dict):
        raise ValidationError("model artifact must be a JSON object")
    expected = {
        "schema_version", "method", "alpha", "n_cal", "q_hat", "p_threshold",
        "class_names", "quantile_lo_level", "quantile_hi_level", "per_class",
        "insufficient", "created_at",
    }
    missing = expected - doc.keys()
    if missing:
        raise ValidationError(f"model artifact is missing fields: {sorted(missing)}")
    if doc["schema_version"] != SCHEMA_VERSION:
        raise ValidationError(
            f"unsupported schema_version {doc['schema_version']!r}, expected {SCHEMA_VERSION}"
        )
    method = doc["method"]
    alpha = _dec_float(doc["alpha"], "alpha")
    if alpha is None:
        raise ValidationError("alpha must not be null")
    created_at = doc["created_at"]
    if created_at is not None and not isinstance(created_at, str):
        raise ValidationError(f"created_at must be a string or null, got {created_at!r}")

    if method in CLASSIFIER_METHODS:
        names = doc["class_names"]
        if not isinstance(names, list) or not all(isinstance(n, str) for n in names):
            raise ValidationError("class_names must be a list of strings")
        per_class = None
        if doc["per_class"] is not None:
            per_class = {}
            for name, e in doc["per_class"].items():
                per_class[name] = PerClassThreshold(
                    n=int(e["n"]),
                    q_hat=_dec_float(e["q_hat"], f"per_class[{name}].q_hat"),
                    p_threshold=_dec_float(
                        e["p_threshold"], f"per_class[{name}].p_threshold"
                    ),
                    insufficient=bool(e["insufficient"]),
                )
        return CalibratedClassifier(
            method=method,
            alpha=alpha,
            n_cal=int(doc["n_cal"]),
            class_names=tuple(names),
            q_hat=_dec_float(doc["q_hat"], "q_hat"),
            p_threshold=_dec_float(doc["p_threshold"], "p_threshold"),
            per_class=per_class,
            insufficient=bool(doc["insufficient"]),
            created_at=created_at,
        )
    if method in REGRESSOR_METHODS:
        q_hat = _dec_float(doc["q_hat"], "q_hat")
        if q_hat is None:
            raise ValidationError("q_hat must not be null for a regressor")
        return CalibratedRegressor(
            method=method,
            alpha=alpha,
            n_cal=int(doc["n_cal"]),
            q_hat=q_hat,
            quantile_lo_level=_dec_float(doc["quantile_lo_level"], "quantile_lo_level"),
            quantile_hi_level=_dec_float(doc["quantile_hi_level"], "quantile_hi_level"),
            insufficient=bool(doc["insufficient"]),
            created_at=created_at,
        )
    raise ValidationError(f"unknown model method {method!r}")


def save_model(model, path) -> None:
    with open(path, "w", encoding="utf-8", newline="\n") as f:
        f.write(encode_model(model))


def load_model(path) -> CalibratedClassifier | CalibratedRegressor:
    with open(path, "r", encoding="utf-8") as f:
        return decode_model(f.read())
