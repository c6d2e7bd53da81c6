"""
Scoring candidate seams
=======================

A seam score of 1 means every inked window across the joint matches a
continuity template; each non-matching window adds one. Blank seams are
unmatchable rather than perfect, so empty edges never glue to anything.
True neighbors from a clean page score 1; wrong pairings pick up
misalignment penalties.
"""

from unshred import (
    Orientation,
    build_template_bank,
    edge_profile,
    generate_corpus,
    match_pair,
    seam_score,
    shred,
)
from unshred.similarity import ProfiledStrip, facing_pairs

bank = build_template_bank()

page = generate_corpus("image", 192, 192, seed=21)
strip_set, gt = shred(page, m=6, seed=4)
by_position = {gt.placement[s.id][1]: s for s in strip_set.strips}

profiled = {
    s.id: ProfiledStrip(s.id, edge_profile(s.raster)) for s in strip_set.strips
}

print("ordered pair scores (best over the four orientation cases):\n")
print("        " + "".join(f"q={s.id}   " for s in strip_set.strips))
for p in strip_set.strips:
    row = []
    for q in strip_set.strips:
        if p.id == q.id:
            row.append("  .  ")
            continue
        score, case = match_pair(profiled[p.id], profiled[q.id], bank)
        row.append(f"{score:5.0f}" if score != float("inf") else "  inf")
    print(f"  p={p.id}  " + " ".join(row))

print("\ntrue neighbors and their winning orientation case:")
for j in range(5):
    left, right = by_position[j], by_position[j + 1]
    score, case = match_pair(profiled[left.id], profiled[right.id], bank)
    print(f"  positions {j}-{j+1} (ids {left.id},{right.id}): "
          f"score {score:.0f} via {case.name}")

# the same computation, spelled out for one seam: slide the 4x4 window
# down the four columns that straddle the joint and count non-matches
left, right = by_position[2], by_position[3]
case = Orientation(2 * gt.placement[left.id][2] + gt.placement[right.id][2])
right_pair, left_pair = facing_pairs(
    edge_profile(left.raster), edge_profile(right.raster), case
)
print(f"\nseam 2-3 scored directly: {seam_score(right_pair, left_pair, bank):.0f}")
