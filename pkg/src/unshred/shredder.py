"""Simulated strip shredding and scan-sheet composition.

A page raster is cut into ``m`` vertical strips along fixed column
boundaries, the strips of all pages are pooled, shuffled and individually
rotated 180 degrees by a seeded fair coin, mimicking how physical strips
land in a pile. ``compose_sheet`` then lays the shuffled strips onto a
black scan-sheet canvas the way an operator would arrange them on a
flatbed bed with a dark cover.

Column partition: strip ``j`` covers columns ``j*(X//m) .. (j+1)*(X//m)-1``
and the last strip absorbs the ``X mod m`` remainder columns, so every
cut position is reproducible from ``(X, m)`` alone.
"""

from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .artifacts import read_json, write_json
from .errors import ConsistencyError, GeometryError
from .raster import binarize, ensure_binary, load_pgm, to_gray

SHEET_INK = 64
SHEET_PAPER = 255


@dataclass(frozen=True, eq=False)
class Strip:
    """One shredded piece: an id and its binary raster."""

    id: int
    raster: np.ndarray

    @property
    def width(self) -> int:
        return self.raster.shape[1]

    @property
    def height(self) -> int:
        return self.raster.shape[0]


@dataclass(frozen=True)
class StripSet:
    """Strips in shuffled order plus the shared page geometry."""

    strips: tuple
    page_width: int
    page_height: int
    strip_width: int  # base width X // m; the last strip of a page may be wider


@dataclass(frozen=True)
class GroundTruth:
    """Where every strip came from: id -> (page, position, flipped)."""

    pages: int
    strips_per_page: int
    placement: dict

    def flipped(self, strip_id: int) -> bool:
        return self.placement[strip_id][2]


def cut_bounds(width: int, m: int) -> list[tuple[int, int]]:
    """Inclusive column ranges (a, b) of each strip position 0..m-1."""
    base = width // m
    bounds = [(j * base, (j + 1) * base - 1) for j in range(m)]
    bounds[-1] = (bounds[-1][0], width - 1)
    return bounds


def shred_document(pages, m: int, seed: int) -> tuple[StripSet, GroundTruth]:
    """Cut every page into m strips, pool, shuffle and coin-flip them.

    Returns the shuffled strip set together with the ground truth needed
    to score a reconstruction later. Output is fully determined by
    ``seed``: the permutation is drawn first, then one flip bit per strip.
    """
    pages = [ensure_binary(p, f"page {i}") for i, p in enumerate(pages)]
    if not pages:
        raise GeometryError("no pages to shred")
    height, width = pages[0].shape
    for i, p in enumerate(pages):
        if p.shape != (height, width):
            raise GeometryError(
                f"page {i} is {p.shape[1]}x{p.shape[0]}, expected {width}x{height}"
            )
    if width < 2:
        raise GeometryError("page must be at least 2 columns wide")
    if not 1 <= m <= width // 2:
        raise GeometryError(f"m={m} outside 1..{width // 2} for page width {width}")

    bounds = cut_bounds(width, m)
    pieces = []  # (page index, position, raster)
    for i, page in enumerate(pages):
        for j, (a, b) in enumerate(bounds):
            pieces.append((i, j, page[:, a : b + 1]))

    rng = np.random.default_rng(seed)
    order = rng.permutation(len(pieces))
    flips = rng.integers(0, 2, len(pieces))

    strips = []
    placement = {}
    for new_id, k in enumerate(order):
        i, j, raster = pieces[k]
        flipped = bool(flips[new_id])
        if flipped:
            raster = np.rot90(raster, 2)
        strips.append(Strip(new_id, np.ascontiguousarray(raster)))
        placement[new_id] = (i, j, flipped)

    strip_set = StripSet(tuple(strips), width, height, width // m)
    return strip_set, GroundTruth(len(pages), m, placement)


def shred(page: np.ndarray, m: int, seed: int) -> tuple[StripSet, GroundTruth]:
    """Single-page shred; identical to shred_document([page], m, seed)."""
    return shred_document([page], m, seed)


def compose_sheet_with_layout(strip_set: StripSet, gap: int, seed: int):
    """Render strips on a black canvas and report where each one went.

    Strips are placed in a fresh seeded order, left to right in one row,
    separated by at least ``gap`` black pixels on every side. Paper cells
    render as 255 and ink cells as 64 so the pure-black background (0)
    stays unambiguous. Returns ``(sheet, layout)`` where layout is a list
    of ``(strip_id, left, top, width, height)``.
    """
    if gap < 1:
        raise GeometryError(f"gap must be >= 1, got {gap}")
    strips = strip_set.strips
    if not strips:
        return np.zeros((1, 1), dtype=np.uint8), []

    rng = np.random.default_rng(seed)
    order = rng.permutation(len(strips))

    height = strips[0].height
    total_w = gap + sum(strips[k].width + gap for k in order)
    sheet = np.zeros((height + 2 * gap, total_w), dtype=np.uint8)

    layout = []
    x = gap
    for k in order:
        s = strips[k]
        block = np.where(s.raster == 1, SHEET_INK, SHEET_PAPER).astype(np.uint8)
        sheet[gap : gap + s.height, x : x + s.width] = block
        layout.append((s.id, x, gap, s.width, s.height))
        x += s.width + gap
    return sheet, layout


def compose_sheet(strip_set: StripSet, gap: int, seed: int) -> np.ndarray:
    """Scan-sheet raster only; see compose_sheet_with_layout."""
    sheet, _ = compose_sheet_with_layout(strip_set, gap, seed)
    return sheet


def strip_filename(strip_id: int) -> str:
    return f"strip_{strip_id:04d}.pgm"


def save_shredded(out_dir, strip_set: StripSet, gt: GroundTruth, writer=None) -> Path:
    """Write one PGM per strip plus the ground-truth manifest.

    Manifest schema: {pages, strips_per_page, page_width, page_height,
    strips: [{id, file, page, position, flipped}]}.
    """
    out_dir = Path(out_dir)
    entries = []
    for s in strip_set.strips:
        fname = strip_filename(s.id)
        data = write_strip_bytes(s.raster)
        if writer is not None:
            writer.write_bytes(out_dir / fname, data)
        else:
            out_dir.mkdir(parents=True, exist_ok=True)
            (out_dir / fname).write_bytes(data)
        page, position, flipped = gt.placement[s.id]
        entries.append(
            {
                "id": s.id,
                "file": fname,
                "page": page,
                "position": position,
                "flipped": flipped,
            }
        )
    manifest = {
        "pages": gt.pages,
        "strips_per_page": gt.strips_per_page,
        "page_width": strip_set.page_width,
        "page_height": strip_set.page_height,
        "strips": entries,
    }
    path = out_dir / "strips.json"
    if writer is not None:
        writer.write_json(path, manifest)
    else:
        write_json(path, manifest)
    return path


def write_strip_bytes(binary_raster: np.ndarray) -> bytes:
    from .raster import write_pgm

    return write_pgm(to_gray(binary_raster))


def load_shredded(manifest_path) -> tuple[StripSet, GroundTruth]:
    """Read a strips.json manifest and its strip PGMs back."""
    manifest_path = Path(manifest_path)
    doc = read_json(manifest_path)
    for key in ("pages", "strips_per_page", "page_width", "page_height", "strips"):
        if key not in doc:
            raise ConsistencyError(f"strip manifest missing field {key!r}")
    strips = []
    placement = {}
    for entry in doc["strips"]:
        raster = binarize(load_pgm(manifest_path.parent / entry["file"]))
        strips.append(Strip(int(entry["id"]), raster))
        placement[int(entry["id"])] = (
            int(entry["page"]),
            int(entry["position"]),
            bool(entry["flipped"]),
        )
    strip_set = StripSet(
        tuple(strips),
        int(doc["page_width"]),
        int(doc["page_height"]),
        int(doc["page_width"]) // int(doc["strips_per_page"]),
    )
    gt = GroundTruth(int(doc["pages"]), int(doc["strips_per_page"]), placement)
    return strip_set, gt
