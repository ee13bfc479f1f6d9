"""Core value types and the finite-sample conformal quantile.

The central quantity here is the corrected quantile level

    q_level = ceil((1 + n_cal) * (1 - alpha)) / n_cal

together with the order statistic it selects from a calibration score
sample. Everything in this module is a pure function of its inputs and
every type is frozen, so values can be shared freely across threads.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

from .errors import (
    EmptyScores,
    EmptyVector,
    EntryOutOfRange,
    NonFiniteScore,
    SumOutOfTolerance,
    ValidationError,
)

#: Default tolerance on |sum - 1| when validating probability vectors.
#: Exported per-class probability bands are often quantized, so exact
#: simplex sums cannot be assumed of real inputs.
DEFAULT_SUM_TOLERANCE = 1e-3

#: Absolute slack used when (1 + n) * (1 - alpha) lands next to an
#: integer: products such as 10 * 0.9 = 9.000000000000002 must not be
#: ceiled up an extra step.
CEIL_GUARD = 1e-9


def guarded_ceil(x: float) -> int:
    """Ceiling of ``x``, snapping values within ``CEIL_GUARD`` of an integer.

    Plain ``math.ceil`` is one whole step too high whenever floating-point
    error pushes an exact integer product infinitesimally above itself,
    which changes the selected order statistic. Values within the guard
    of an integer are treated as that integer.
    """
    nearest = round(x)
    if abs(x - nearest) <= CEIL_GUARD:
        return int(nearest)
    return math.ceil(x)


def check_alpha(alpha: float) -> None:
    """Raise ``ValidationError`` unless ``alpha`` lies strictly in (0, 1)."""
    if not isinstance(alpha, (int, float)) or math.isnan(alpha):
        raise ValidationError(f"alpha must be a number in (0, 1), got {alpha!r}")
    if not 0.0 < alpha < 1.0:
        raise ValidationError(f"alpha must be in (0, 1), got {alpha}")


@dataclass(frozen=True)
class ConfidenceSpec:
    """A confidence level with its derived miscoverage tolerance.

    ``alpha`` is always derived as ``1 - confidence`` and never set
    independently, so ``confidence + alpha == 1.0`` holds exactly as
    stored.

    Examples
    --------
    >>> ConfidenceSpec(0.9).alpha
    0.09999999999999998
    >>> ConfidenceSpec.from_alpha(0.05).confidence
    0.95
    """

    confidence: float
    alpha: float = field(init=False)

    def __post_init__(self) -> None:
        if not isinstance(self.confidence, (int, float)) or math.isnan(self.confidence):
            raise ValidationError(
                f"confidence must be a number in (0, 1), got {self.confidence!r}"
            )
        if not 0.0 < self.confidence < 1.0:
            raise ValidationError(f"confidence must be in (0, 1), got {self.confidence}")
        object.__setattr__(self, "alpha", 1.0 - self.confidence)

    @classmethod
    def from_alpha(cls, alpha: float) -> "ConfidenceSpec":
        check_alpha(alpha)
        return cls(confidence=1.0 - alpha)


@dataclass(frozen=True)
class ProbabilityVector:
    """Per-class probabilities for one instance, stored unmodified.

    Entries must lie in [0, 1]; the simplex-sum check is tolerance
    dependent and lives in :func:`validate_probability_vector`.
    """

    values: tuple[float, ...]

    def __post_init__(self) -> None:
        if len(self.values) == 0:
            raise EmptyVector("probability vector has no entries")
        for i, v in enumerate(self.values):
            if not 0.0 <= v <= 1.0:
                raise EntryOutOfRange(f"entry {i} is {v}, outside [0, 1]")

    @property
    def class_count(self) -> int:
        return len(self.values)


def validate_probability_vector(
    values, tolerance: float = DEFAULT_SUM_TOLERANCE
) -> ProbabilityVector:
    """Check entries and simplex sum, returning the vector unmodified.

    Parameters
    ----------
    values : iterable of float
        Candidate per-class probabilities.
    tolerance : float
        Maximum allowed |sum - 1|. Inputs outside the tolerance are
        rejected, never renormalized.

    Raises
    ------
    EmptyVector, EntryOutOfRange, SumOutOfTolerance
    """
    vec = ProbabilityVector(tuple(float(v) for v in values))
    total = sum(vec.values)
    if abs(total - 1.0) > tolerance:
        raise SumOutOfTolerance(
            f"probabilities sum to {total!r}, more than {tolerance} away from 1"
        )
    return vec


@dataclass(frozen=True)
class LabeledExample:
    """A classification calibration instance: probabilities plus true label."""

    probs: ProbabilityVector
    label: int
    group: str | None = None

    def __post_init__(self) -> None:
        if not 0 <= self.label < self.probs.class_count:
            raise ValidationError(
                f"label {self.label} outside [0, {self.probs.class_count})"
            )


@dataclass(frozen=True)
class RegressionExample:
    """A regression calibration instance.

    ``y_hat`` feeds the absolute-residual score; ``q_lo``/``q_hi`` feed
    the quantile-regression score. Fields a given score does not need
    may stay ``None``.
    """

    y: float
    y_hat: float | None = None
    q_lo: float | None = None
    q_hi: float | None = None
    group: str | None = None

    def __post_init__(self) -> None:
        if self.q_lo is not None and self.q_hi is not None and self.q_lo > self.q_hi:
            from .errors import InvertedQuantiles

            raise InvertedQuantiles(
                f"q_lo {self.q_lo} exceeds q_hi {self.q_hi}"
            )


@dataclass(frozen=True)
class ConformalQuantileResult:
    """Outcome of the finite-sample quantile computation.

    ``q_hat`` is ``math.inf`` when the corrected rank exceeds the sample
    size, in which case ``insufficient`` is set and downstream consumers
    degrade to full sets or unbounded intervals rather than failing.
    """

    q_hat: float
    q_level: float
    k: int
    n_cal: int
    insufficient: bool


def corrected_rank(n_cal: int, alpha: float) -> int:
    """The rank k = ceil((1 + n_cal) * (1 - alpha)) selected by calibration.

    Always in [1, n_cal + 1]; the value n_cal + 1 means no order
    statistic of the sample attains the corrected level.
    """
    if not isinstance(n_cal, int) or n_cal < 1:
        raise ValidationError(f"n_cal must be a positive integer, got {n_cal!r}")
    check_alpha(alpha)
    return guarded_ceil((1 + n_cal) * (1.0 - alpha))


def quantile_level(n_cal: int, alpha: float) -> float:
    """Finite-sample corrected quantile level ceil((1+n)(1-alpha)) / n.

    The level exceeds the naive ``1 - alpha`` and can exceed 1, in which
    case no order statistic attains it.

    Examples
    --------
    >>> quantile_level(100, 0.1)
    0.91
    >>> quantile_level(9, 0.05)  # rank 10 of 9: unattainable
    1.1111111111111112
    """
    return corrected_rank(n_cal, alpha) / n_cal


def conformal_quantile(scores, alpha: float) -> ConformalQuantileResult:
    """Select the corrected empirical quantile of calibration scores.

    The k-th smallest score with k = ceil((n+1)(1-alpha)) is returned
    without interpolation; ties are kept as duplicates. When k exceeds
    n the result carries ``q_hat = inf`` and ``insufficient = True``.

    Parameters
    ----------
    scores : iterable of float
        Nonconformity scores of the calibration set. Must be finite.
    alpha : float
        Miscoverage tolerance in (0, 1).

    Returns
    -------
    ConformalQuantileResult
    """
    check_alpha(alpha)
    vals = [float(s) for s in scores]
    if not vals:
        raise EmptyScores("no calibration scores given")
    for i, s in enumerate(vals):
        if not math.isfinite(s):
            raise NonFiniteScore(f"score {i} is {s}, not finite")
    n = len(vals)
    k = corrected_rank(n, alpha)
    if k <= n:
        q_hat = sorted(vals)[k - 1]
        insufficient = False
    else:
        q_hat = math.inf
        insufficient = True
    return ConformalQuantileResult(
        q_hat=q_hat, q_level=k / n, k=k, n_cal=n, insufficient=insufficient
    )
