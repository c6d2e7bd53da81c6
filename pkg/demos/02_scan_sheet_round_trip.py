"""
Lay strips on a scan sheet, then find them again
================================================

Physical strips get arranged on a flatbed scanner over a dark cover so
the background separates them. The composer renders that scene: black
background, paper at 255, ink at 64. The segmenter then recovers each
strip as a 4-connected component and crops its bounding box.
"""

from pathlib import Path

import numpy as np

from unshred import (
    compose_sheet_with_layout,
    generate_corpus,
    match_segments_to_layout,
    save_pgm,
    segment_sheet,
    shred,
)

out = Path(__file__).parent / "output"
out.mkdir(exist_ok=True)

page = generate_corpus("typeset", 192, 192, seed=3)
strip_set, gt = shred(page, m=6, seed=11)

sheet, layout = compose_sheet_with_layout(strip_set, gap=4, seed=99)
save_pgm(out / "scan_sheet.pgm", sheet)
print(f"sheet: {sheet.shape[1]}x{sheet.shape[0]}, {len(layout)} strips placed")

segments = segment_sheet(sheet)
print(f"segmenter found {len(segments)} components:")
for seg in segments:
    left, top, width, height = seg.bounds
    print(f"  segment {seg.id}: {width}x{height} at ({left},{top})")

# the composer's layout tells us which segment is which original strip;
# the recovered pixels must match the originals exactly
recovered = match_segments_to_layout(segments, layout)
originals = {s.id: s.raster for s in strip_set.strips}
for strip in recovered:
    assert np.array_equal(strip.raster, originals[strip.id])
print("every segment matches its source strip bit for bit")
