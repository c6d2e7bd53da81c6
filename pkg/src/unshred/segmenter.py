"""Recover individual strips from a composed scan sheet.

Non-background pixels (intensity above ``BACKGROUND_THRESHOLD``) are
grouped into 4-connected components; each component's bounding box is
cropped and binarized. 4-connectivity is deliberate: two strips whose
corners touch diagonally across a one-pixel gap must not merge.
"""

from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path

import numpy as np
from scipy import ndimage

from .artifacts import read_json, write_json
from .errors import ConsistencyError, FragmentationError
from .raster import binarize, ensure_gray, load_pgm, to_gray
from .shredder import Strip

BACKGROUND_THRESHOLD = 16
MAX_COMPONENTS = 10_000

_FOUR_CONNECTED = np.array([[0, 1, 0], [1, 1, 1], [0, 1, 0]], dtype=np.uint8)


@dataclass(frozen=True, eq=False)
class SegmentedStrip:
    """A cropped strip: binary raster plus its bounding box on the sheet."""

    id: int
    raster: np.ndarray
    bounds: tuple  # (left, top, width, height)


def segment_sheet(
    sheet: np.ndarray,
    background_threshold: int = BACKGROUND_THRESHOLD,
    ink_threshold: int = 128,
    max_components: int = MAX_COMPONENTS,
) -> list[SegmentedStrip]:
    """Split a sheet into strips, ordered by bounding-box (top, left).

    Within each box, a pixel is ink iff background_threshold < intensity
    < ink_threshold; box pixels at background intensity count as paper so
    the crop keeps its full rectangle.
    """
    sheet = ensure_gray(sheet, "sheet")
    mask = sheet > background_threshold
    labels, count = ndimage.label(mask, structure=_FOUR_CONNECTED)
    if count > max_components:
        raise FragmentationError(
            f"sheet too fragmented: {count} components exceed limit {max_components}"
        )
    if count == 0:
        return []

    boxes = ndimage.find_objects(labels)
    ordered = sorted(range(count), key=lambda k: (boxes[k][0].start, boxes[k][1].start))

    out = []
    for new_id, k in enumerate(ordered):
        ys, xs = boxes[k]
        crop = sheet[ys, xs]
        binary = ((crop > background_threshold) & (crop < ink_threshold)).astype(np.uint8)
        bounds = (xs.start, ys.start, xs.stop - xs.start, ys.stop - ys.start)
        out.append(SegmentedStrip(new_id, binary, bounds))
    return out


def segment_filename(seg_id: int) -> str:
    return f"segment_{seg_id:04d}.pgm"


def save_segments(out_dir, segments, writer=None) -> Path:
    """Write per-segment PGMs plus the manifest [{id, file, left, top, width, height}]."""
    out_dir = Path(out_dir)
    entries = []
    for seg in segments:
        fname = segment_filename(seg.id)
        data = _segment_bytes(seg)
        if writer is not None:
            writer.write_bytes(out_dir / fname, data)
        else:
            out_dir.mkdir(parents=True, exist_ok=True)
            (out_dir / fname).write_bytes(data)
        left, top, width, height = seg.bounds
        entries.append(
            {
                "id": seg.id,
                "file": fname,
                "left": left,
                "top": top,
                "width": width,
                "height": height,
            }
        )
    path = out_dir / "segments.json"
    if writer is not None:
        writer.write_json(path, entries)
    else:
        write_json(path, entries)
    return path


def _segment_bytes(seg: SegmentedStrip) -> bytes:
    from .raster import write_pgm

    return write_pgm(to_gray(seg.raster))


def load_segments(manifest_path) -> list[SegmentedStrip]:
    manifest_path = Path(manifest_path)
    doc = read_json(manifest_path)
    if not isinstance(doc, list):
        raise ConsistencyError("segment manifest must be a JSON list")
    out = []
    for entry in doc:
        raster = binarize(load_pgm(manifest_path.parent / entry["file"]))
        bounds = (
            int(entry["left"]),
            int(entry["top"]),
            int(entry["width"]),
            int(entry["height"]),
        )
        out.append(SegmentedStrip(int(entry["id"]), raster, bounds))
    return out


def match_segments_to_layout(segments, layout) -> list[Strip]:
    """Relabel segmented strips with their original ids via sheet placement.

    ``layout`` comes from compose_sheet_with_layout. The join is by exact
    bounding box, which a noise-free sheet guarantees; any mismatch means
    the sheet and layout do not belong together.
    """
    by_bounds = {(left, top, w, h): sid for sid, left, top, w, h in layout}
    if len(segments) != len(by_bounds):
        raise ConsistencyError(
            f"segment count {len(segments)} does not match layout count {len(by_bounds)}"
        )
    strips = []
    for seg in segments:
        sid = by_bounds.get(seg.bounds)
        if sid is None:
            raise ConsistencyError(f"segment bounds {seg.bounds} not present in layout")
        strips.append(Strip(sid, seg.raster))
    return strips
