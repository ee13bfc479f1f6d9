"""Synthetic data, data splits, and small reference models.

Everything random is driven by a counter-based 64-bit generator
(numpy's Philox) seeded explicitly, so any artifact is reproducible
from its seed on any platform.

The synthetic generators return oracle quantities in closed form: the
exact class posterior for the Gaussian mixture and exact conditional
quantiles for the regression family. That makes coverage claims
testable without training anything.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from statistics import NormalDist

import numpy as np

from .core import ProbabilityVector, corrected_rank, guarded_ceil
from .errors import (
    BadProportions,
    DegenerateCoordinates,
    EmptyInput,
    InvalidSpec,
    KTooLarge,
    TooFewGroups,
    TooFewPoints,
    ValidationError,
)


def _rng(seed: int) -> np.random.Generator:
    return np.random.Generator(np.random.Philox(seed))


# --- synthetic classification ------------------------------------------------

@dataclass(frozen=True)
class SyntheticClassSpec:
    """An isotropic Gaussian mixture with known class posterior.

    ``temperature`` reshapes the oracle posterior before it is reported:
    1 leaves the exact posterior, larger values flatten it toward
    uniform (an over-smoothed, miscalibrated model), smaller values
    sharpen it (overconfident). Labels are unaffected.
    """

    means: tuple[tuple[float, ...], ...]
    sigma: float
    weights: tuple[float, ...]
    temperature: float = 1.0
    seed: int = 0

    def __post_init__(self) -> None:
        if len(self.means) < 2:
            raise InvalidSpec(f"need at least 2 classes, got {len(self.means)}")
        dim = len(self.means[0])
        if dim < 1 or any(len(m) != dim for m in self.means):
            raise InvalidSpec("class means must be non-empty and share a dimension")
        if not (math.isfinite(self.sigma) and self.sigma > 0):
            raise InvalidSpec(f"sigma must be positive, got {self.sigma}")
        if len(self.weights) != len(self.means):
            raise InvalidSpec(
                f"{len(self.weights)} weights for {len(self.means)} classes"
            )
        if any(w < 0 for w in self.weights):
            raise InvalidSpec(f"weights must be nonnegative, got {self.weights}")
        if abs(sum(self.weights) - 1.0) > 1e-12:
            raise InvalidSpec(f"weights must sum to 1, got sum {sum(self.weights)!r}")
        if not (math.isfinite(self.temperature) and self.temperature > 0):
            raise InvalidSpec(f"temperature must be positive, got {self.temperature}")

    @property
    def class_count(self) -> int:
        return len(self.means)

    @property
    def dimension(self) -> int:
        return len(self.means[0])


@dataclass(frozen=True)
class ClassSample:
    features: tuple[float, ...]
    label: int
    probs: ProbabilityVector


def circle_means(class_count: int, radius: float = 3.0, dimension: int = 2):
    """Class means evenly spaced on a circle (zeros in extra dimensions)."""
    if class_count < 2:
        raise InvalidSpec(f"need at least 2 classes, got {class_count}")
    if dimension < 2:
        raise InvalidSpec(f"circle layout needs dimension >= 2, got {dimension}")
    out = []
    for c in range(class_count):
        angle = 2.0 * math.pi * c / class_count
        m = [radius * math.cos(angle), radius * math.sin(angle)]
        m.extend(0.0 for _ in range(dimension - 2))
        out.append(tuple(m))
    return tuple(out)


def mixture_posterior(spec: SyntheticClassSpec, x: np.ndarray) -> np.ndarray:
    """Temperature-scaled Bayes posterior for feature rows ``x``.

    Row-wise softmax of ``(log w_c - |x - mu_c|^2 / (2 sigma^2)) / t``,
    evaluated with a max shift so flat or spiky posteriors stay finite.
    """
    x = np.asarray(x, dtype=np.float64)
    means = np.asarray(spec.means, dtype=np.float64)
    with np.errstate(divide="ignore"):
        log_w = np.log(np.asarray(spec.weights, dtype=np.float64))
    d2 = ((x[:, None, :] - means[None, :, :]) ** 2).sum(axis=2)
    logits = (log_w[None, :] - d2 / (2.0 * spec.sigma**2)) / spec.temperature
    logits -= logits.max(axis=1, keepdims=True)
    p = np.exp(logits)
    p /= p.sum(axis=1, keepdims=True)
    return p


def gen_class_mixture(spec: SyntheticClassSpec, n: int) -> list[ClassSample]:
    """Draw n labelled points with their (temperature-scaled) oracle posterior."""
    if n < 1:
        raise InvalidSpec(f"n must be >= 1, got {n}")
    rng = _rng(spec.seed)
    cum = np.cumsum(np.asarray(spec.weights, dtype=np.float64))
    labels = np.searchsorted(cum, rng.random(n), side="right")
    labels = np.minimum(labels, spec.class_count - 1)
    means = np.asarray(spec.means, dtype=np.float64)
    x = means[labels] + spec.sigma * rng.standard_normal((n, spec.dimension))
    probs = mixture_posterior(spec, x)
    return [
        ClassSample(
            features=tuple(float(v) for v in x[i]),
            label=int(labels[i]),
            probs=ProbabilityVector(tuple(float(v) for v in probs[i])),
        )
        for i in range(n)
    ]


# --- synthetic regression -----------------------------------------------------

def _triangle(u: np.ndarray) -> np.ndarray:
    return np.where(u < 0.5, 2.0 * u, 2.0 - 2.0 * u)


_MEAN_FNS = {
    "sinusoid": lambda u: np.sin(2.0 * math.pi * u),
    "piecewise_linear": _triangle,
    "linear": lambda u: u,
}

# Multiplier on noise_scale as a function of position u in [0, 1]. The
# increasing profile is affine with a strictly positive floor, so oracle
# interval width is strictly increasing in u.
_NOISE_FNS = {
    "constant": lambda u: np.ones_like(u),
    "increasing": lambda u: 0.1 + u,
}


@dataclass(frozen=True)
class SyntheticRegSpec:
    """One-dimensional regression with Gaussian noise of known profile."""

    mean_fn: str = "sinusoid"
    noise_fn: str = "increasing"
    noise_scale: float = 1.0
    x_min: float = 0.0
    x_max: float = 1.0
    seed: int = 0

    def __post_init__(self) -> None:
        if self.mean_fn not in _MEAN_FNS:
            raise InvalidSpec(
                f"unknown mean_fn {self.mean_fn!r}, expected one of {sorted(_MEAN_FNS)}"
            )
        if self.noise_fn not in _NOISE_FNS:
            raise InvalidSpec(
                f"unknown noise_fn {self.noise_fn!r}, expected one of {sorted(_NOISE_FNS)}"
            )
        if not (math.isfinite(self.noise_scale) and self.noise_scale > 0):
            raise InvalidSpec(f"noise_scale must be positive, got {self.noise_scale}")
        if not self.x_min < self.x_max:
            raise InvalidSpec(f"x_min {self.x_min} must be below x_max {self.x_max}")


@dataclass(frozen=True)
class RegSample:
    """One draw with the oracle mean and conditional quantiles at the levels asked."""

    x: float
    y: float
    y_hat: float
    q_lo: float
    q_hi: float


def reg_noise_sd(spec: SyntheticRegSpec, x) -> np.ndarray:
    """Oracle noise standard deviation at raw positions ``x``."""
    u = (np.asarray(x, dtype=np.float64) - spec.x_min) / (spec.x_max - spec.x_min)
    return spec.noise_scale * _NOISE_FNS[spec.noise_fn](u)


def gen_heteroscedastic_reg(
    spec: SyntheticRegSpec, n: int, levels: tuple[float, float] = (0.05, 0.95)
) -> list[RegSample]:
    """Draw n (x, y) pairs with exact conditional quantiles at ``levels``."""
    if n < 1:
        raise InvalidSpec(f"n must be >= 1, got {n}")
    lo, hi = float(levels[0]), float(levels[1])
    if not 0.0 < lo < hi < 1.0:
        raise InvalidSpec(f"levels must satisfy 0 < lo < hi < 1, got {levels}")
    rng = _rng(spec.seed)
    x = spec.x_min + (spec.x_max - spec.x_min) * rng.random(n)
    u = (x - spec.x_min) / (spec.x_max - spec.x_min)
    mean = _MEAN_FNS[spec.mean_fn](u)
    sd = spec.noise_scale * _NOISE_FNS[spec.noise_fn](u)
    y = mean + sd * rng.standard_normal(n)
    z_lo = NormalDist().inv_cdf(lo)
    z_hi = NormalDist().inv_cdf(hi)
    return [
        RegSample(
            x=float(x[i]),
            y=float(y[i]),
            y_hat=float(mean[i]),
            q_lo=float(mean[i] + sd[i] * z_lo),
            q_hi=float(mean[i] + sd[i] * z_hi),
        )
        for i in range(n)
    ]


# --- splits -------------------------------------------------------------------

@dataclass(frozen=True)
class SplitAssignment:
    """A partition of instance indices into parts (or folds).

    ``assignments[i]`` is the part index of instance i. ``proportions``
    is ``None`` for fold-style splits where parts are meant to be
    roughly equal.
    """

    assignments: tuple[int, ...]
    part_count: int
    seed: int
    proportions: tuple[float, ...] | None = None

    def counts(self) -> tuple[int, ...]:
        c = [0] * self.part_count
        for a in self.assignments:
            c[a] += 1
        return tuple(c)

    def indices(self, part: int) -> tuple[int, ...]:
        if not 0 <= part < self.part_count:
            raise ValidationError(f"part {part} out of range [0, {self.part_count})")
        return tuple(i for i, a in enumerate(self.assignments) if a == part)


def _check_proportions(proportions) -> tuple[float, ...]:
    props = tuple(float(p) for p in proportions)
    if len(props) < 2:
        raise BadProportions(f"need at least 2 parts, got {len(props)}")
    if any(not (math.isfinite(p) and p > 0) for p in props):
        raise BadProportions(f"proportions must be positive, got {props}")
    if abs(sum(props) - 1.0) > 1e-9:
        raise BadProportions(f"proportions must sum to 1, got sum {sum(props)!r}")
    return props


def largest_remainder_sizes(n: int, proportions) -> tuple[int, ...]:
    """Integer part sizes summing to n, by the largest-remainder rule.

    Each part gets floor(p * n); leftover units go to the largest
    fractional remainders, earliest part first on ties.
    """
    props = _check_proportions(proportions)
    if n < 0:
        raise ValidationError(f"n must be >= 0, got {n}")
    raw = [p * n for p in props]
    base = [math.floor(r) for r in raw]
    leftover = n - sum(base)
    order = sorted(range(len(props)), key=lambda j: (-(raw[j] - base[j]), j))
    for j in order[:leftover]:
        base[j] += 1
    return tuple(base)


def random_split(n: int, proportions, seed: int) -> SplitAssignment:
    """Assign n instances to parts uniformly at random with exact sizes.

    Part sizes are fixed by :func:`largest_remainder_sizes`; a seeded
    permutation then decides which instance lands where.
    """
    props = _check_proportions(proportions)
    if n < 1:
        raise ValidationError(f"n must be >= 1, got {n}")
    sizes = largest_remainder_sizes(n, props)
    perm = _rng(seed).permutation(n)
    assignments = [0] * n
    start = 0
    for part, size in enumerate(sizes):
        for i in perm[start : start + size]:
            assignments[int(i)] = part
        start += size
    return SplitAssignment(
        assignments=tuple(assignments),
        part_count=len(props),
        seed=seed,
        proportions=props,
    )


def grouped_split(groups, proportions, seed: int) -> SplitAssignment:
    """Assign whole groups to parts, never splitting a group.

    Distinct groups (in first-appearance order) are shuffled with the
    seed, then handed out greedily: each group goes to the part whose
    instance count is furthest below its target share, earliest part on
    ties. Realized proportions are as close as atomic groups allow.
    """
    groups = [str(g) for g in groups]
    if not groups:
        raise EmptyInput("no group labels given")
    props = _check_proportions(proportions)
    distinct: list[str] = []
    seen = set()
    for g in groups:
        if g not in seen:
            seen.add(g)
            distinct.append(g)
    if len(distinct) < len(props):
        raise TooFewGroups(
            f"{len(distinct)} distinct groups cannot fill {len(props)} parts"
        )
    sizes = {g: 0 for g in distinct}
    for g in groups:
        sizes[g] += 1
    total = len(groups)
    order = _rng(seed).permutation(len(distinct))
    assigned = [0] * len(props)
    part_of: dict[str, int] = {}
    for gi in order:
        g = distinct[int(gi)]
        best, best_deficit = 0, -math.inf
        for j, p in enumerate(props):
            deficit = p * total - assigned[j]
            if deficit > best_deficit:
                best, best_deficit = j, deficit
        part_of[g] = best
        assigned[best] += sizes[g]
    return SplitAssignment(
        assignments=tuple(part_of[g] for g in groups),
        part_count=len(props),
        seed=seed,
        proportions=props,
    )


def spatial_cluster_folds(coords, k: int, seed: int) -> SplitAssignment:
    """Partition points into k spatially compact folds by k-means.

    Lloyd's algorithm with seeded initialization (k distinct points
    sampled uniformly), ties to the lowest centroid index, empty
    clusters keeping their previous centroid, and a hard cap of 100
    iterations. Fold sizes are as balanced as the geometry allows, not
    exactly equal.
    """
    pts = np.asarray([tuple(float(v) for v in c) for c in coords], dtype=np.float64)
    if pts.ndim != 2 or pts.shape[0] == 0:
        raise EmptyInput("no coordinates given")
    if not isinstance(k, int) or k < 2:
        raise ValidationError(f"k must be an integer >= 2, got {k!r}")
    distinct_idx: list[int] = []
    seen_pts = set()
    for i, row in enumerate(pts):
        key = tuple(row.tolist())
        if key not in seen_pts:
            seen_pts.add(key)
            distinct_idx.append(i)
    if len(distinct_idx) == 1:
        raise DegenerateCoordinates("all coordinates are identical")
    if len(distinct_idx) < k:
        raise TooFewPoints(f"{len(distinct_idx)} distinct points for k={k} folds")
    order = _rng(seed).permutation(len(distinct_idx))
    centroids = pts[[distinct_idx[int(i)] for i in order[:k]]].copy()
    assign = np.full(pts.shape[0], -1, dtype=np.int64)
    for _ in range(100):
        d2 = ((pts[:, None, :] - centroids[None, :, :]) ** 2).sum(axis=2)
        new_assign = d2.argmin(axis=1)
        if np.array_equal(new_assign, assign):
            break
        assign = new_assign
        for j in range(k):
            members = pts[assign == j]
            if len(members):
                centroids[j] = members.mean(axis=0)
    return SplitAssignment(
        assignments=tuple(int(a) for a in assign),
        part_count=k,
        seed=seed,
        proportions=None,
    )


# --- reference models -----------------------------------------------------------

def _neighbor_order(train_x: np.ndarray, query: np.ndarray) -> np.ndarray:
    d2 = ((train_x - query[None, :]) ** 2).sum(axis=1)
    return np.argsort(d2, kind="stable")


def knn_class_probs(train, query, k: int, class_count: int | None = None) -> ProbabilityVector:
    """Class frequencies among the k nearest training points.

    Euclidean distance; distance ties are broken by training-set order,
    so results do not depend on any internal sort's whims.
    """
    train = list(train)
    if not train:
        raise EmptyInput("no training points given")
    if not isinstance(k, int) or k < 1:
        raise ValidationError(f"k must be a positive integer, got {k!r}")
    if k > len(train):
        raise KTooLarge(f"k={k} exceeds {len(train)} training points")
    train_x = np.asarray([f for f, _ in train], dtype=np.float64)
    labels = [int(lbl) for _, lbl in train]
    if class_count is None:
        class_count = max(labels) + 1
    q = np.asarray(tuple(float(v) for v in query), dtype=np.float64)
    counts = [0] * class_count
    for i in _neighbor_order(train_x, q)[:k]:
        counts[labels[int(i)]] += 1
    return ProbabilityVector(tuple(c / k for c in counts))


def knn_class_probs_batch(train, queries, k: int, class_count: int | None = None) -> list[ProbabilityVector]:
    """Vectorized :func:`knn_class_probs` over many queries (same results)."""
    train = list(train)
    if not train:
        raise EmptyInput("no training points given")
    if not isinstance(k, int) or k < 1:
        raise ValidationError(f"k must be a positive integer, got {k!r}")
    if k > len(train):
        raise KTooLarge(f"k={k} exceeds {len(train)} training points")
    train_x = np.asarray([f for f, _ in train], dtype=np.float64)
    labels = np.asarray([int(lbl) for _, lbl in train])
    if class_count is None:
        class_count = int(labels.max()) + 1
    qx = np.asarray([tuple(float(v) for v in q) for q in queries], dtype=np.float64)
    out: list[ProbabilityVector] = []
    for start in range(0, len(qx), 512):
        chunk = qx[start : start + 512]
        d2 = ((chunk[:, None, :] - train_x[None, :, :]) ** 2).sum(axis=2)
        nearest = np.argsort(d2, axis=1, kind="stable")[:, :k]
        for row in nearest:
            counts = np.bincount(labels[row], minlength=class_count)
            out.append(ProbabilityVector(tuple(float(c) / k for c in counts)))
    return out


def _order_statistic(sorted_ys: np.ndarray, level: float, k: int) -> float:
    idx = guarded_ceil(level * k)
    idx = min(max(idx, 1), k)
    return float(sorted_ys[idx - 1])


def knn_quantile_predict(train, query, k: int, level: float) -> float:
    """Order statistic of the k nearest targets at the given level.

    The rank is ceil(level * k), clamped to [1, k]; no interpolation, so
    the prediction is always an observed target value.
    """
    if not 0.0 < level < 1.0:
        raise ValidationError(f"level must be in (0, 1), got {level}")
    train = list(train)
    if not train:
        raise EmptyInput("no training points given")
    if not isinstance(k, int) or k < 1:
        raise ValidationError(f"k must be a positive integer, got {k!r}")
    if k > len(train):
        raise KTooLarge(f"k={k} exceeds {len(train)} training points")
    train_x = np.asarray([f for f, _ in train], dtype=np.float64)
    ys = np.asarray([float(y) for _, y in train])
    q = np.asarray(tuple(float(v) for v in query), dtype=np.float64)
    nearest = _neighbor_order(train_x, q)[:k]
    return _order_statistic(np.sort(ys[nearest]), level, k)


def knn_quantile_batch(train, queries, k: int, levels) -> np.ndarray:
    """Vectorized :func:`knn_quantile_predict` over queries and levels.

    Returns an array of shape (n_queries, n_levels).
    """
    levels = [float(lv) for lv in levels]
    for lv in levels:
        if not 0.0 < lv < 1.0:
            raise ValidationError(f"level must be in (0, 1), got {lv}")
    train = list(train)
    if not train:
        raise EmptyInput("no training points given")
    if not isinstance(k, int) or k < 1:
        raise ValidationError(f"k must be a positive integer, got {k!r}")
    if k > len(train):
        raise KTooLarge(f"k={k} exceeds {len(train)} training points")
    train_x = np.asarray([f for f, _ in train], dtype=np.float64)
    ys = np.asarray([float(y) for _, y in train])
    qx = np.asarray([tuple(float(v) for v in q) for q in queries], dtype=np.float64)
    ranks = [min(max(guarded_ceil(lv * k), 1), k) for lv in levels]
    out = np.empty((len(qx), len(levels)), dtype=np.float64)
    for start in range(0, len(qx), 512):
        chunk = qx[start : start + 512]
        d2 = ((chunk[:, None, :] - train_x[None, :, :]) ** 2).sum(axis=2)
        nearest = np.argsort(d2, axis=1, kind="stable")[:, :k]
        neigh_sorted = np.sort(ys[nearest], axis=1)
        for j, r in enumerate(ranks):
            out[start : start + len(chunk), j] = neigh_sorted[:, r - 1]
    return out


# --- coverage oracle --------------------------------------------------------------

def expected_coverage(n_cal: int, alpha: float) -> float:
    """Exact expected coverage k / (n_cal + 1) under exchangeability.

    With continuous scores the rank of the test score among all
    n_cal + 1 scores is uniform, and the test point is covered exactly
    when that rank is at most k.
    """
    return min(corrected_rank(n_cal, alpha), n_cal + 1) / (n_cal + 1)


def coverage_oracle_mc(n_cal: int, alpha: float, trials: int, seed: int) -> tuple[float, float]:
    """Monte-Carlo coverage of the corrected quantile on iid uniform scores.

    Returns (mean coverage, its Monte-Carlo standard error). Agrees with
    :func:`expected_coverage` up to the standard error; useful as an
    independent check that the rank correction is not off by one.
    """
    if not isinstance(trials, int) or trials < 1:
        raise ValidationError(f"trials must be a positive integer, got {trials!r}")
    k = corrected_rank(n_cal, alpha)
    rng = _rng(seed)
    scores = rng.random((trials, n_cal + 1))
    if k <= n_cal:
        q_hat = np.sort(scores[:, :n_cal], axis=1)[:, k - 1]
        covered = scores[:, n_cal] <= q_hat
        mean = float(covered.mean())
    else:
        mean = 1.0
    se = math.sqrt(mean * (1.0 - mean) / trials)
    return mean, se
