"""Document unshredding toolkit.

Simulates strip-shredding of binary page images, recovers the strips from
a composed scan sheet, scores candidate seams with a 4x4 continuity
template bank, reassembles pages by greedy best-seam merging (with an
exhaustive oracle for small instances) and measures the result against
ground truth.
"""

from .assembler import (
    Chain,
    Reconstruction,
    SeamScoreTable,
    brute_force_assemble,
    build_score_table,
    deserialize_reconstruction,
    greedy_assemble,
    serialize_reconstruction,
)
from .errors import (
    ConsistencyError,
    DegenerateStripError,
    FragmentationError,
    GeometryError,
    PgmParseError,
    SearchSizeError,
    UnshredError,
)
from .evaluate import (
    DOC_CLASSES,
    EvalReport,
    adjacency_accuracy,
    count_perfect_pages,
    evaluate_reconstruction,
    format_report_table,
    generate_corpus,
    page_purity,
    stitch,
)
from .pipeline import PipelineConfig, apply_corrections, run_class_pipeline, run_pipeline
from .preprocess import (
    EdgeProfile,
    OrientationStatus,
    OrientedStrip,
    edge_profile,
    ink_density,
    normalize_orientation,
    orient_strip,
    remove_blanks,
)
from .raster import binarize, load_pgm, read_pgm, save_pgm, to_gray, write_pgm
from .segmenter import SegmentedStrip, match_segments_to_layout, segment_sheet
from .shredder import (
    GroundTruth,
    Strip,
    StripSet,
    compose_sheet,
    compose_sheet_with_layout,
    cut_bounds,
    shred,
    shred_document,
)
from .similarity import (
    ALL_ORIENTATIONS,
    EdgeCodes,
    Orientation,
    ProfiledStrip,
    SeamWindow,
    Template,
    UNMATCHABLE,
    build_template_bank,
    coded_seam_detail,
    facing_pairs,
    match_pair,
    match_pair_coded,
    render_bank_sheet,
    seam_score,
    seam_score_detail,
    seam_windows,
    template_codes,
)

__version__ = "0.1.0"
