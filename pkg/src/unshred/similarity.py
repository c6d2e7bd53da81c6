"""Seam similarity scoring with a bank of 4x4 continuity templates.

A candidate seam between a left strip and a right strip is examined
through every 4x4 window that slides down the four pixel columns abutting
the seam (the left strip's two rightmost columns next to the right
strip's two leftmost). A window that contains ink is a *hit* when its
exact 4x4 pattern appears in the template bank; the seam score is

    1 + (number of inked windows that are not hits)

so 1 means every inked window looks like legitimate continuing content,
and larger is worse. A seam with no inked window at all is UNMATCHABLE:
blankness neither confirms nor denies continuity, and treating it as
perfect would glue blank-edged strips to everything.

The bank is generated, not hand-listed: six base shapes (thin horizontal,
vertical and 45-degree lines; half-plane fills bounded by a horizontal,
vertical and 45-degree edge) are slid under the 4x4 window across every
offset that leaves at least one ink cell, and the resulting patterns are
closed under the eight mirror/rotation symmetries. Sliding is performed
over the base shape's natural infinite extension, which is why e.g. the
fully inked window is included (a half-plane fill seen from inside).
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import IntEnum

import numpy as np

from .errors import GeometryError
from .preprocess import EdgeProfile

WINDOW = 4

UNMATCHABLE = float("inf")

# bit 15 is window cell (row 0, col 0), bit 0 is (row 3, col 3)
_BIT_WEIGHTS = (1 << np.arange(WINDOW * WINDOW - 1, -1, -1, dtype=np.int64)).reshape(
    WINDOW, WINDOW
)
# the same bit layout split into the window's left half (cols 0,1: the
# left strip's inner then outer column) and right half (cols 2,3)
_LEFT_HALF_WEIGHTS = _BIT_WEIGHTS[:, :2].copy()
_RIGHT_HALF_WEIGHTS = _BIT_WEIGHTS[:, 2:].copy()


class Orientation(IntEnum):
    """The four ways two strip edges can face each other across a seam.

    Either strip may be rotated 180 degrees (a strip never shows its
    mirror image, only its upside-down self). Enum order is the fixed
    evaluation priority used to break score ties.
    """

    UPRIGHT_UPRIGHT = 0
    UPRIGHT_FLIPPED = 1
    FLIPPED_UPRIGHT = 2
    FLIPPED_FLIPPED = 3

    @property
    def left_flipped(self) -> bool:
        return self in (Orientation.FLIPPED_UPRIGHT, Orientation.FLIPPED_FLIPPED)

    @property
    def right_flipped(self) -> bool:
        return self in (Orientation.UPRIGHT_FLIPPED, Orientation.FLIPPED_FLIPPED)


ALL_ORIENTATIONS = tuple(Orientation)


@dataclass(frozen=True, eq=False)
class Template:
    """One 4x4 binary continuity pattern."""

    cells: np.ndarray

    @property
    def key(self) -> str:
        return "".join("1" if v else "0" for v in self.cells.flatten())

    @property
    def code(self) -> int:
        return int((self.cells.astype(np.int64) * _BIT_WEIGHTS).sum())


@dataclass(frozen=True, eq=False)
class SeamWindow:
    cells: np.ndarray
    y_offset: int


@dataclass(frozen=True, eq=False)
class ProfiledStrip:
    """What pair matching needs from a strip: id, edges, orientation hint."""

    id: int
    profile: EdgeProfile
    confident: bool = False


def _base_canvases(size: int = 12):
    mid = size // 2
    canvases = []
    c = np.zeros((size, size), dtype=np.uint8)
    c[mid, :] = 1  # thin horizontal line
    canvases.append(c)
    c = np.zeros((size, size), dtype=np.uint8)
    c[:, mid] = 1  # thin vertical line
    canvases.append(c)
    c = np.eye(size, dtype=np.uint8)  # thin 45-degree line
    canvases.append(c)
    c = np.zeros((size, size), dtype=np.uint8)
    c[mid:, :] = 1  # fill below a horizontal edge
    canvases.append(c)
    c = np.zeros((size, size), dtype=np.uint8)
    c[:, mid:] = 1  # fill right of a vertical edge
    canvases.append(c)
    c = np.tril(np.ones((size, size), dtype=np.uint8))  # fill below the diagonal
    canvases.append(c)
    return canvases


def build_template_bank() -> list[Template]:
    """Enumerate the closed template set, sorted by cell string.

    Every 4x4 window onto each base shape with at least one ink cell is
    collected, then the set is closed under horizontal/vertical mirroring
    and quarter-turn rotations and deduplicated.
    """
    seen: dict[str, np.ndarray] = {}

    def add(grid: np.ndarray) -> None:
        key = "".join("1" if v else "0" for v in grid.flatten())
        if key not in seen:
            seen[key] = grid.astype(np.uint8)

    for canvas in _base_canvases():
        h, w = canvas.shape
        for y in range(h - WINDOW + 1):
            for x in range(w - WINDOW + 1):
                win = canvas[y : y + WINDOW, x : x + WINDOW]
                if not win.any():
                    continue
                for k in range(4):
                    rot = np.rot90(win, k)
                    add(rot)
                    add(np.fliplr(rot))
                    add(np.flipud(rot))

    bank = []
    for key in sorted(seen):
        cells = seen[key].copy()
        cells.setflags(write=False)
        bank.append(Template(cells))
    return bank


def template_codes(bank) -> np.ndarray:
    """Bank as a sorted array of 16-bit window codes for fast membership."""
    if isinstance(bank, np.ndarray):
        return bank
    return np.sort(np.array([t.code for t in bank], dtype=np.int64))


def _check_columns(columns) -> int:
    length = len(columns[0])
    for col in columns:
        if len(col) != length:
            raise GeometryError("seam columns must share one length")
    if length < WINDOW:
        raise GeometryError(f"seam columns of length {length} < window size {WINDOW}")
    return length


def _seam_matrix(right_pair, left_pair) -> np.ndarray:
    """Columns across the seam in physical left-to-right order.

    ``right_pair``/``left_pair`` are (outer, inner) column pairs of the
    left strip's right edge and the right strip's left edge.
    """
    right_outer, right_inner = right_pair
    left_outer, left_inner = left_pair
    _check_columns((right_outer, right_inner, left_outer, left_inner))
    return np.stack(
        [
            np.asarray(right_inner, dtype=np.uint8),
            np.asarray(right_outer, dtype=np.uint8),
            np.asarray(left_outer, dtype=np.uint8),
            np.asarray(left_inner, dtype=np.uint8),
        ],
        axis=1,
    )


def seam_windows(right_pair, left_pair) -> list[SeamWindow]:
    """All 4x4 windows down a seam, one per vertical offset."""
    cols = _seam_matrix(right_pair, left_pair)
    out = []
    for y in range(cols.shape[0] - WINDOW + 1):
        cells = cols[y : y + WINDOW].copy()
        cells.setflags(write=False)
        out.append(SeamWindow(cells, y))
    return out


def _window_codes(cols: np.ndarray) -> np.ndarray:
    views = np.lib.stride_tricks.sliding_window_view(cols, (WINDOW, WINDOW))[:, 0]
    return np.tensordot(views.astype(np.int64), _BIT_WEIGHTS, axes=([1, 2], [0, 1]))


def seam_score_detail(right_pair, left_pair, bank):
    """(score, informative window count, hit count) for one seam."""
    cols = _seam_matrix(right_pair, left_pair)
    codes = _window_codes(cols)
    informative = codes[codes != 0]
    if informative.size == 0:
        return UNMATCHABLE, 0, 0
    hits = int(np.isin(informative, template_codes(bank)).sum())
    return 1 + int(informative.size) - hits, int(informative.size), hits


def seam_score(right_pair, left_pair, bank):
    """Scalar seam score: 1 is perfect continuity, UNMATCHABLE is blank."""
    return seam_score_detail(right_pair, left_pair, bank)[0]


def facing_pairs(p: EdgeProfile, q: EdgeProfile, case: Orientation):
    """The (outer, inner) column pairs that meet at the seam for one case.

    Rotating a strip 180 degrees turns its left edge into its reversed
    right edge and vice versa, so flipped cases read the opposite profile
    columns backwards.
    """
    if case.left_flipped:
        right_pair = (p.left_outer[::-1], p.left_inner[::-1])
    else:
        right_pair = (p.right_outer, p.right_inner)
    if case.right_flipped:
        left_pair = (q.right_outer[::-1], q.right_inner[::-1])
    else:
        left_pair = (q.left_outer, q.left_inner)
    return right_pair, left_pair


@dataclass(frozen=True, eq=False)
class EdgeCodes:
    """Per-window half-codes of one strip's edges, precomputed once.

    The 4x4 window down a seam splits into the left strip's two columns
    and the right strip's two columns; each half packs into fixed bit
    positions, so a pair-orientation evaluation reduces to OR-ing two
    cached arrays and counting template membership. This is what keeps
    the quadratic pair loop cheap.

    ``as_left[flipped]``/``as_right[flipped]`` hold the codes this strip
    contributes when it sits left/right of the seam in that flip state.
    """

    as_left: dict
    as_right: dict

    @classmethod
    def from_profile(cls, profile: EdgeProfile) -> "EdgeCodes":
        def halves(outer, inner, weights, inner_first):
            cols = (inner, outer) if inner_first else (outer, inner)
            mat = np.stack([np.asarray(c, dtype=np.int64) for c in cols], axis=1)
            views = np.lib.stride_tricks.sliding_window_view(mat, (WINDOW, 2))[:, 0]
            return np.tensordot(views, weights, axes=([1, 2], [0, 1]))

        p = profile
        return cls(
            as_left={
                False: halves(p.right_outer, p.right_inner, _LEFT_HALF_WEIGHTS, True),
                True: halves(
                    p.left_outer[::-1], p.left_inner[::-1], _LEFT_HALF_WEIGHTS, True
                ),
            },
            as_right={
                False: halves(p.left_outer, p.left_inner, _RIGHT_HALF_WEIGHTS, False),
                True: halves(
                    p.right_outer[::-1], p.right_inner[::-1], _RIGHT_HALF_WEIGHTS, False
                ),
            },
        )


def coded_seam_detail(p_codes: EdgeCodes, q_codes: EdgeCodes, case: Orientation, bank_codes):
    """(score, informative, hits) from cached half-codes; equals
    seam_score_detail on the corresponding columns exactly."""
    w = p_codes.as_left[case.left_flipped] | q_codes.as_right[case.right_flipped]
    informative_mask = w != 0
    informative = int(informative_mask.sum())
    if informative == 0:
        return UNMATCHABLE, 0, 0
    idx = np.searchsorted(bank_codes, w)
    np.minimum(idx, len(bank_codes) - 1, out=idx)
    hits = int(((bank_codes[idx] == w) & informative_mask).sum())
    return 1 + informative - hits, informative, hits


def match_pair_coded(
    p_codes: EdgeCodes, q_codes: EdgeCodes, bank_codes, cases, trace=None
):
    """match_pair on cached half-codes: same scores, ties, and order."""
    best_score, best_case = None, None
    for case in sorted(cases):
        score, informative, hits = coded_seam_detail(p_codes, q_codes, case, bank_codes)
        if trace is not None:
            trace(case, score, informative, hits)
        if best_score is None or score < best_score:
            best_score, best_case = score, case
    return best_score, best_case


def match_pair(p: ProfiledStrip, q: ProfiledStrip, bank, orientations=None, trace=None):
    """Best (score, orientation) for strip p sitting left of strip q.

    Evaluates the requested orientation cases in enum order and keeps the
    lowest score; earlier cases win ties. ``trace``, when given, receives
    ``(case, score, informative, hits)`` per evaluated case.
    """
    if p.id == q.id:
        raise ValueError(f"cannot match strip {p.id} against itself")
    cases = ALL_ORIENTATIONS if orientations is None else tuple(orientations)
    if not cases:
        raise ValueError("no orientation cases requested")
    codes = template_codes(bank)
    best_score, best_case = None, None
    for case in sorted(cases):
        right_pair, left_pair = facing_pairs(p.profile, q.profile, case)
        score, informative, hits = seam_score_detail(right_pair, left_pair, codes)
        if trace is not None:
            trace(case, score, informative, hits)
        if best_score is None or score < best_score:
            best_score, best_case = score, case
    return best_score, best_case


def render_bank_sheet(bank, cell: int = 8, gap: int = 2) -> np.ndarray:
    """Contact-sheet gray raster of the whole bank, for visual inspection."""
    per_row = 8
    rows = (len(bank) + per_row - 1) // per_row
    tile = WINDOW * cell
    sheet = np.full(
        (gap + rows * (tile + gap), gap + per_row * (tile + gap)), 128, dtype=np.uint8
    )
    for idx, t in enumerate(bank):
        r, c = divmod(idx, per_row)
        y = gap + r * (tile + gap)
        x = gap + c * (tile + gap)
        block = np.kron(t.cells, np.ones((cell, cell), dtype=np.uint8))
        sheet[y : y + tile, x : x + tile] = np.where(block == 1, 0, 255)
    return sheet
