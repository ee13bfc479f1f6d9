"""Nonconformity scores.

Three scores cover the supported tasks: hinge (one minus the probability
assigned to the true class), absolute residual, and the signed
quantile-regression score. Larger always means less conforming.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .errors import InvertedQuantiles, MissingField, NonFinite, OutOfRange

SCORE_METHODS = ("hinge", "abs_residual", "cqr")


def hinge_score(p_true: float) -> float:
    """Score ``1 - p_true`` for the probability assigned to the true class.

    Strictly decreasing in ``p_true``: confident correct predictions
    conform, confident wrong ones do not.
    """
    if not 0.0 <= p_true <= 1.0:
        raise OutOfRange(f"p_true must be in [0, 1], got {p_true}")
    return 1.0 - p_true


def absolute_residual_score(y: float, y_hat: float) -> float:
    """Score ``|y - y_hat|`` for a point prediction."""
    if not (math.isfinite(y) and math.isfinite(y_hat)):
        raise NonFinite(f"y and y_hat must be finite, got y={y}, y_hat={y_hat}")
    return abs(y - y_hat)


def cqr_score(q_lo: float, q_hi: float, y: float) -> float:
    """Signed distance ``max(q_lo - y, y - q_hi)`` from a quantile band.

    Negative inside the band (more negative deeper inside), positive
    outside; zero exactly on either edge.
    """
    if not (math.isfinite(q_lo) and math.isfinite(q_hi) and math.isfinite(y)):
        raise NonFinite(
            f"q_lo, q_hi, y must all be finite, got {q_lo}, {q_hi}, {y}"
        )
    if q_lo > q_hi:
        raise InvertedQuantiles(f"q_lo {q_lo} exceeds q_hi {q_hi}")
    return max(q_lo - y, y - q_hi)


@dataclass(frozen=True)
class ScoreVector:
    """Nonconformity scores for a calibration set, in input order."""

    scores: tuple[float, ...]
    method: str


def score_calibration_set(examples, method: str) -> ScoreVector:
    """Score every example with one method, preserving input order.

    Parameters
    ----------
    examples : sequence
        ``LabeledExample`` items for ``"hinge"``; ``RegressionExample``
        items for ``"abs_residual"`` and ``"cqr"``.
    method : str
        One of ``SCORE_METHODS``.

    Raises
    ------
    MissingField
        When an example lacks a field the method needs; the message
        names the example's position.
    """
    if method not in SCORE_METHODS:
        raise OutOfRange(f"unknown score method {method!r}, expected one of {SCORE_METHODS}")
    out: list[float] = []
    for i, ex in enumerate(examples):
        if method == "hinge":
            probs = getattr(ex, "probs", None)
            label = getattr(ex, "label", None)
            if probs is None or label is None:
                raise MissingField(f"example {i}: hinge needs probs and label")
            out.append(hinge_score(probs.values[label]))
        elif method == "abs_residual":
            y = getattr(ex, "y", None)
            y_hat = getattr(ex, "y_hat", None)
            if y is None or y_hat is None:
                raise MissingField(f"example {i}: abs_residual needs y and y_hat")
            out.append(absolute_residual_score(y, y_hat))
        else:
            y = getattr(ex, "y", None)
            q_lo = getattr(ex, "q_lo", None)
            q_hi = getattr(ex, "q_hi", None)
            if y is None or q_lo is None or q_hi is None:
                raise MissingField(f"example {i}: cqr needs y, q_lo and q_hi")
            out.append(cqr_score(q_lo, q_hi, y))
    return ScoreVector(scores=tuple(out), method=method)
