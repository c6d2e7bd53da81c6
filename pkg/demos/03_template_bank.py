"""
The continuity template bank
============================

Seam scoring asks one question per 4x4 window: does this pixel
neighborhood look like content continuing across the cut? The bank of
legitimate patterns is generated from six base shapes (thin lines and
half-plane edges in three directions), slid under the window across all
offsets and closed under mirroring and rotation.
"""

from pathlib import Path

from unshred import build_template_bank, render_bank_sheet, save_pgm

out = Path(__file__).parent / "output"
out.mkdir(exist_ok=True)

bank = build_template_bank()
print(f"bank holds {len(bank)} distinct 4x4 patterns\n")

def show(template):
    for row in template.cells:
        print("   " + "".join("#" if v else "." for v in row))
    print()

print("first pattern in lexicographic order (a corner dot):")
show(bank[0])

print("a full block (seen when a filled region spans the seam):")
show(next(t for t in bank if t.key == "1" * 16))

print("the main diagonal line:")
show(next(t for t in bank if t.key == "1000010000100001"))

# contact sheet with one tile per template, for visual inspection
save_pgm(out / "template_bank.pgm", render_bank_sheet(bank))
print(f"wrote contact sheet with all {len(bank)} templates")
