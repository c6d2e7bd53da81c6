"""Strip preprocessing: blank removal, orientation normalization and
edge-profile extraction.

Orientation is decided by an ink-asymmetry heuristic rather than character
recognition: within each detected text-line band, Latin-style print carries
more ink in the upper part of the band than in the lower part. The result
is a tri-state so downstream matching can fall back to trying all four
edge orientations whenever the call is ambiguous; a wrong "ambiguous"
costs extra work, never correctness.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum

import numpy as np

from .errors import DegenerateStripError
from .raster import ensure_binary
from .shredder import Strip

DEFAULT_BLANK_EPSILON = 0.001
CONFIDENCE_RATIO = 1.15


class OrientationStatus(Enum):
    UPRIGHT = "confident_upright"
    CORRECTED = "confident_flipped_and_corrected"
    AMBIGUOUS = "ambiguous"


@dataclass(frozen=True, eq=False)
class OrientedStrip:
    strip: Strip
    status: OrientationStatus

    @property
    def confident(self) -> bool:
        return self.status is not OrientationStatus.AMBIGUOUS


@dataclass(frozen=True, eq=False)
class EdgeProfile:
    """The four outermost pixel columns of a strip.

    left_outer/left_inner are strip columns 0 and 1; right_outer/right_inner
    are columns width-1 and width-2. These four length-Y binary arrays are
    the sole input to seam scoring.
    """

    left_outer: np.ndarray
    left_inner: np.ndarray
    right_inner: np.ndarray
    right_outer: np.ndarray

    @property
    def height(self) -> int:
        return len(self.left_outer)


def ink_density(raster: np.ndarray) -> float:
    raster = ensure_binary(raster)
    return float(raster.sum()) / raster.size


def remove_blanks(strips, epsilon: float = DEFAULT_BLANK_EPSILON):
    """Partition strips into (kept, removed) by ink density > epsilon.

    Order is preserved in both sublists; the removed list is returned so
    reports can show what was discarded.
    """
    if epsilon < 0:
        raise ValueError(f"epsilon must be >= 0, got {epsilon}")
    kept, removed = [], []
    for s in strips:
        (kept if ink_density(s.raster) > epsilon else removed).append(s)
    return kept, removed


def _band_runs(above: np.ndarray):
    """Maximal runs of consecutive True rows, as (start, stop) half-open."""
    runs = []
    start = None
    for y, flag in enumerate(above):
        if flag and start is None:
            start = y
        elif not flag and start is not None:
            runs.append((start, y))
            start = None
    if start is not None:
        runs.append((start, len(above)))
    return runs


def normalize_orientation(raster: np.ndarray, confidence_ratio: float = CONFIDENCE_RATIO):
    """Decide whether a strip is upright and rotate it when it is not.

    Detects text-line bands (maximal runs of rows whose ink density exceeds
    the strip mean), sums ink over the top third versus the bottom third of
    each band, and compares the aggregate ratio against the confidence
    threshold. Returns ``(raster, OrientationStatus)`` where the raster has
    been rotated 180 degrees iff the status is CORRECTED.
    """
    raster = ensure_binary(raster)
    row_ink = raster.sum(axis=1, dtype=np.int64)
    total = int(row_ink.sum())
    if total == 0:
        return raster, OrientationStatus.AMBIGUOUS

    # row density > mean density reduces to row_ink * rows > total
    above = row_ink * raster.shape[0] > total
    upper = lower = 0
    for start, stop in _band_runs(above):
        third = (stop - start) // 3
        if third == 0:
            continue
        upper += int(row_ink[start : start + third].sum())
        lower += int(row_ink[stop - third : stop].sum())

    # cross-multiplied comparisons keep the rot180 symmetry exact
    if upper > lower * confidence_ratio:
        return raster, OrientationStatus.UPRIGHT
    if upper * confidence_ratio < lower:
        return np.ascontiguousarray(np.rot90(raster, 2)), OrientationStatus.CORRECTED
    return raster, OrientationStatus.AMBIGUOUS


def orient_strip(strip: Strip, confidence_ratio: float = CONFIDENCE_RATIO) -> OrientedStrip:
    raster, status = normalize_orientation(strip.raster, confidence_ratio)
    return OrientedStrip(Strip(strip.id, raster), status)


def edge_profile(raster: np.ndarray) -> EdgeProfile:
    """Extract the two outermost pixel columns on each side of a strip."""
    raster = ensure_binary(raster)
    h, w = raster.shape
    if w < 2:
        raise DegenerateStripError(f"strip width {w} < 2: no edge columns to extract")
    if h < 4:
        raise DegenerateStripError(f"strip height {h} < 4: shorter than a seam window")
    return EdgeProfile(
        left_outer=raster[:, 0].copy(),
        left_inner=raster[:, 1].copy(),
        right_inner=raster[:, w - 2].copy(),
        right_outer=raster[:, w - 1].copy(),
    )
