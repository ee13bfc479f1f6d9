"""Pixel-wise application of calibrated classifiers to raster grids.

A grid lives in two files sharing a base path: ``<base>.json`` holds
the header (width, height, band_count, band_names, nodata, dtype) and
``<base>.bin`` holds the payload, little-endian, band-sequential,
row-major within each band. Probability grids are binary32; the two
output planes are a uint8 set-length plane (255 = nodata) and a uint16
packed-membership plane (bit c = class c), where a pixel is nodata
exactly when the pair reads (membership 0, length 255).

The apply step processes contiguous row stripes, optionally on a thread
pool. Stripes only ever read shared inputs and write disjoint output
rows, and every pixel's arithmetic is independent of the stripe layout,
so the output is byte-identical for any worker count.
"""

from __future__ import annotations

import json
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from .calibration import CalibratedClassifier
from .errors import (
    AllNodata,
    ClassMismatch,
    HeaderParseError,
    PayloadSizeMismatch,
    UnsupportedBandCount,
    ValidationError,
)
from .evaluation import EfficiencyReport

#: Packed membership is uint16, so at most 16 classes per grid.
MAX_BANDS = 16

#: Set-length value that marks a nodata pixel in the uint8 plane.
NODATA_LENGTH = 255

_DTYPES = {"float32": "<f4", "uint8": "u1", "uint16": "<u2"}


@dataclass(frozen=True)
class GridHeader:
    """Shape and band metadata for one grid file pair."""

    width: int
    height: int
    band_count: int
    band_names: tuple[str, ...]
    nodata: float | None
    dtype: str = "float32"

    def __post_init__(self) -> None:
        if self.width < 1 or self.height < 1:
            raise ValidationError(
                f"grid dimensions must be positive, got {self.width}x{self.height}"
            )
        if self.band_count < 1:
            raise ValidationError(f"band_count must be >= 1, got {self.band_count}")
        if len(self.band_names) != self.band_count:
            raise ValidationError(
                f"{len(self.band_names)} band names for {self.band_count} bands"
            )
        if self.dtype not in _DTYPES:
            raise ValidationError(
                f"dtype must be one of {sorted(_DTYPES)}, got {self.dtype!r}"
            )


@dataclass(frozen=True, eq=False)
class ProbabilityGrid:
    """A float32 probability raster, shaped (band_count, height, width)."""

    header: GridHeader
    data: np.ndarray

    def __post_init__(self) -> None:
        expected = (self.header.band_count, self.header.height, self.header.width)
        if self.data.shape != expected:
            raise ValidationError(
                f"data shape {self.data.shape} does not match header {expected}"
            )
        if self.data.dtype != np.float32:
            raise ValidationError(f"data must be float32, got {self.data.dtype}")


@dataclass(frozen=True, eq=False)
class UncertaintyGrids:
    """Per-pixel set length and packed membership planes.

    Invariant: on valid pixels the length equals the popcount of the
    membership mask; nodata pixels carry the (0, 255) pair. Pixels whose
    bands were inside range but failed the simplex sum are counted in
    ``simplex_violations`` and written as nodata rather than aborting
    the whole scene.
    """

    set_length: np.ndarray
    membership: np.ndarray
    class_count: int
    simplex_violations: int = 0


@dataclass(frozen=True)
class GridSummary:
    """Aggregate efficiency of one applied scene."""

    efficiency: EfficiencyReport
    per_class_inclusion: tuple[float, ...]
    valid_pixels: int
    nodata_pixels: int


# --- file format -----------------------------------------------------------

def _header_paths(base_path: str) -> tuple[str, str]:
    return f"{base_path}.json", f"{base_path}.bin"


def write_header(header: GridHeader, path: str) -> None:
    doc = {
        "width": header.width,
        "height": header.height,
        "band_count": header.band_count,
        "band_names": list(header.band_names),
        "nodata": header.nodata,
        "dtype": header.dtype,
    }
    with open(path, "w", encoding="utf-8", newline="\n") as f:
        f.write(json.dumps(doc, indent=2) + "\n")


def read_header(path: str) -> GridHeader:
    try:
        with open(path, "r", encoding="utf-8") as f:
            doc = json.load(f)
    except json.JSONDecodeError as e:
        raise HeaderParseError(f"{path}: not valid JSON: {e}") from e
    if not isinstance(doc, dict):
        raise HeaderParseError(f"{path}: header must be a JSON object")
    required = {"width", "height", "band_count", "band_names", "nodata", "dtype"}
    missing = required - doc.keys()
    if missing:
        raise HeaderParseError(f"{path}: missing header fields {sorted(missing)}")
    if not all(isinstance(doc[k], int) and not isinstance(doc[k], bool)
               for k in ("width", "height", "band_count")):
        raise HeaderParseError(f"{path}: width, height, band_count must be integers")
    names = doc["band_names"]
    if not isinstance(names, list) or not all(isinstance(n, str) for n in names):
        raise HeaderParseError(f"{path}: band_names must be a list of strings")
    nodata = doc["nodata"]
    if nodata is not None and (isinstance(nodata, bool) or not isinstance(nodata, (int, float))):
        raise HeaderParseError(f"{path}: nodata must be a number or null")
    try:
        return GridHeader(
            width=doc["width"],
            height=doc["height"],
            band_count=doc["band_count"],
            band_names=tuple(names),
            nodata=None if nodata is None else float(nodata),
            dtype=doc["dtype"] if isinstance(doc["dtype"], str) else "",
        )
    except ValidationError as e:
        raise HeaderParseError(f"{path}: {e}") from e


def _read_payload(header: GridHeader, header_path: str, payload_path: str) -> np.ndarray:
    np_dtype = np.dtype(_DTYPES[header.dtype])
    with open(payload_path, "rb") as f:
        raw = f.read()
    expected = header.band_count * header.height * header.width * np_dtype.itemsize
    if len(raw) != expected:
        raise PayloadSizeMismatch(
            f"{payload_path}: payload is {len(raw)} bytes, header {header_path} implies {expected}"
        )
    flat = np.frombuffer(raw, dtype=np_dtype)
    return flat.reshape(header.band_count, header.height, header.width).copy()


def read_grid(base_path: str) -> ProbabilityGrid:
    """Read a probability grid from ``<base>.json`` + ``<base>.bin``."""
    header_path, payload_path = _header_paths(base_path)
    header = read_header(header_path)
    if header.dtype != "float32":
        raise HeaderParseError(
            f"{header_path}: probability grids must be float32, got {header.dtype!r}"
        )
    if header.band_count > MAX_BANDS:
        raise UnsupportedBandCount(
            f"{header_path}: {header.band_count} bands exceed the supported {MAX_BANDS}"
        )
    data = _read_payload(header, header_path, payload_path).astype(np.float32)
    return ProbabilityGrid(header=header, data=data)


def write_grid(grid: ProbabilityGrid, base_path: str) -> None:
    """Write a probability grid; inverse of :func:`read_grid`."""
    header_path, payload_path = _header_paths(base_path)
    write_header(grid.header, header_path)
    payload = np.ascontiguousarray(grid.data.astype("<f4", copy=False))
    with open(payload_path, "wb") as f:
        f.write(payload.tobytes())


def _write_plane(array: np.ndarray, band_name: str, nodata: float | None,
                 dtype: str, base_path: str) -> None:
    header = GridHeader(
        width=array.shape[1],
        height=array.shape[0],
        band_count=1,
        band_names=(band_name,),
        nodata=nodata,
        dtype=dtype,
    )
    header_path, payload_path = _header_paths(base_path)
    write_header(header, header_path)
    payload = np.ascontiguousarray(array.astype(_DTYPES[dtype], copy=False))
    with open(payload_path, "wb") as f:
        f.write(payload.tobytes())


def read_plane(base_path: str) -> tuple[GridHeader, np.ndarray]:
    """Read a single-band output plane (uint8 or uint16)."""
    header_path, payload_path = _header_paths(base_path)
    header = read_header(header_path)
    if header.band_count != 1:
        raise HeaderParseError(f"{header_path}: expected a single-band plane")
    data = _read_payload(header, header_path, payload_path)
    return header, data[0]


def write_uncertainty_grids(
    grids: UncertaintyGrids, length_base: str, membership_base: str
) -> None:
    """Write the set-length (uint8) and membership (uint16) planes."""
    _write_plane(grids.set_length, "set_length", float(NODATA_LENGTH), "uint8", length_base)
    _write_plane(grids.membership, "set_membership", None, "uint16", membership_base)


def read_uncertainty_grids(
    length_base: str, membership_base: str, class_count: int
) -> UncertaintyGrids:
    """Read planes written by :func:`write_uncertainty_grids`."""
    lh, lengths = read_plane(length_base)
    mh, membership = read_plane(membership_base)
    if lh.dtype != "uint8" or mh.dtype != "uint16":
        raise HeaderParseError(
            f"expected uint8 + uint16 planes, got {lh.dtype!r} + {mh.dtype!r}"
        )
    if lengths.shape != membership.shape:
        raise ValidationError(
            f"plane shapes differ: {lengths.shape} vs {membership.shape}"
        )
    return UncertaintyGrids(
        set_length=lengths, membership=membership, class_count=class_count
    )


# --- pixel-wise application ---------------------------------------------------

def _class_rule(model: CalibratedClassifier) -> tuple[str, np.ndarray]:
    """The membership rule and its per-class constants.

    "lac" compares on the probability scale (p >= p_threshold, with
    -inf when calibration was insufficient); "mondrian" compares on the
    score scale (1 - p <= q_hat, +inf for insufficient classes). The
    forms are kept distinct so each pixel reproduces the scalar
    predictor's float arithmetic exactly.
    """
    if model.method == "lac":
        thr = -math.inf if model.insufficient else model.p_threshold
        return "lac", np.full(model.class_count, thr, dtype=np.float64)
    if model.method == "mondrian":
        return "mondrian", np.asarray(
            [model.per_class[name].q_hat for name in model.class_names],
            dtype=np.float64,
        )
    raise ValidationError(f"not a set-valued classifier method: {model.method!r}")


def _apply_rows(
    data: np.ndarray,
    nodata: float | None,
    rule: str,
    constants: np.ndarray,
    sum_tolerance: float,
) -> tuple[np.ndarray, np.ndarray, int]:
    bands = data.shape[0]
    if nodata is None:
        nodata_mask = np.zeros(data.shape[1:], dtype=bool)
    else:
        nodata_mask = (data == np.float32(nodata)).any(axis=0)
    d = data.astype(np.float64)
    in_range = ((d >= 0.0) & (d <= 1.0)).all(axis=0)
    # Left-to-right summation in band order, matching the scalar
    # validator's sum() so boundary pixels classify identically.
    total = d[0].copy()
    for b in range(1, bands):
        total += d[b]
    simplex_ok = in_range & (np.abs(total - 1.0) <= sum_tolerance)
    valid = ~nodata_mask & simplex_ok
    violations = int((~nodata_mask & ~simplex_ok).sum())

    membership = np.zeros(data.shape[1:], dtype=np.uint16)
    lengths = np.zeros(data.shape[1:], dtype=np.uint8)
    for b in range(bands):
        if rule == "lac":
            include = d[b] >= constants[b]
        else:
            include = (1.0 - d[b]) <= constants[b]
        membership |= include.astype(np.uint16) << np.uint16(b)
        lengths += include.astype(np.uint8)
    membership[~valid] = 0
    lengths[~valid] = NODATA_LENGTH
    return membership, lengths, violations


def apply_classifier_to_grid(
    model: CalibratedClassifier,
    grid: ProbabilityGrid,
    workers: int = 1,
    sum_tolerance: float = 1e-3,
) -> UncertaintyGrids:
    """Apply a calibrated classifier to every pixel of a probability grid.

    Each pixel's band vector goes through the same membership rule as
    the scalar predictor: class c is included when its probability
    reaches the per-class threshold (``1 - q_hat``, shared across
    classes for "lac"). Pixels that match the nodata sentinel in any
    band propagate as nodata; pixels whose bands break the probability
    range or simplex-sum tolerance become nodata and are tallied in
    ``simplex_violations``.

    Parameters
    ----------
    model : CalibratedClassifier
        Band names must equal the model's class names, in order.
    grid : ProbabilityGrid
    workers : int
        Thread count; the grid is cut into contiguous row stripes. Any
        value produces byte-identical planes.
    sum_tolerance : float
        Maximum allowed |sum - 1| per pixel.
    """
    if grid.header.band_count > MAX_BANDS:
        raise UnsupportedBandCount(
            f"{grid.header.band_count} bands exceed the supported {MAX_BANDS}"
        )
    rule, constants = _class_rule(model)
    if grid.header.band_names != model.class_names:
        raise ClassMismatch(
            f"grid bands {grid.header.band_names} do not match model classes {model.class_names}"
        )
    if not isinstance(workers, int) or workers < 1:
        raise ValidationError(f"workers must be a positive integer, got {workers!r}")
    nodata = grid.header.nodata

    height = grid.header.height
    stripe_count = min(workers, height)
    bounds = [round(i * height / stripe_count) for i in range(stripe_count + 1)]
    stripes = [(bounds[i], bounds[i + 1]) for i in range(stripe_count)]

    def run(stripe: tuple[int, int]):
        r0, r1 = stripe
        return _apply_rows(grid.data[:, r0:r1, :], nodata, rule, constants, sum_tolerance)

    if stripe_count == 1:
        results = [run(stripes[0])]
    else:
        with ThreadPoolExecutor(max_workers=stripe_count) as pool:
            results = list(pool.map(run, stripes))

    membership = np.concatenate([r[0] for r in results], axis=0)
    lengths = np.concatenate([r[1] for r in results], axis=0)
    violations = sum(r[2] for r in results)
    return UncertaintyGrids(
        set_length=lengths,
        membership=membership,
        class_count=model.class_count,
        simplex_violations=violations,
    )


def summarize_grid(grids: UncertaintyGrids) -> GridSummary:
    """Aggregate set-size statistics over the valid pixels of a scene."""
    valid = grids.set_length != NODATA_LENGTH
    n_valid = int(valid.sum())
    n_nodata = int(grids.set_length.size - n_valid)
    if n_valid == 0:
        raise AllNodata("grid has no valid pixels")
    lengths = grids.set_length[valid]
    membership = grids.membership[valid]
    mean_size = int(lengths.sum(dtype=np.int64)) / n_valid
    empty_frac = int((lengths == 0).sum()) / n_valid
    full_frac = int((lengths == grids.class_count).sum()) / n_valid
    inclusion = tuple(
        int(((membership >> np.uint16(c)) & np.uint16(1)).sum()) / n_valid
        for c in range(grids.class_count)
    )
    report = EfficiencyReport(
        n=n_valid,
        mean_set_size=mean_size,
        empty_set_fraction=empty_frac,
        full_set_fraction=full_frac,
    )
    return GridSummary(
        efficiency=report,
        per_class_inclusion=inclusion,
        valid_pixels=n_valid,
        nodata_pixels=n_nodata,
    )
