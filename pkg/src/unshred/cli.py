"""Command-line front end.

Subcommands mirror the pipeline stages (shred, compose, segment,
reconstruct, evaluate) plus the all-in-one ``pipeline``. Every stage
reads the previous stage's serialized outputs, so each is runnable
standalone. Exit codes: 0 success, 1 bad input or configuration,
2 internal invariant violation; partially written outputs are removed
on failure.
"""

from __future__ import annotations

import argparse
import json
import sys
from dataclasses import replace
from pathlib import Path

from .artifacts import ArtifactWriter, read_json
from .assembler import (
    build_score_table,
    deserialize_reconstruction,
    greedy_assemble,
    serialize_reconstruction,
)
from .errors import UnshredError
from .evaluate import (
    DOC_CLASSES,
    evaluate_reconstruction,
    format_report_table,
    generate_corpus,
    stitch,
)
from .pipeline import PipelineConfig, apply_corrections, run_pipeline
from .preprocess import OrientationStatus, OrientedStrip, orient_strip, remove_blanks
from .raster import binarize, load_pgm, to_gray, write_pgm
from .segmenter import load_segments, save_segments, segment_sheet
from .shredder import (
    Strip,
    compose_sheet_with_layout,
    load_shredded,
    save_shredded,
    shred_document,
)
from .similarity import build_template_bank


class _UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise _UsageError(message)


def _add_common(sub, *names):
    flags = {
        "m": lambda: sub.add_argument("--m", type=int, default=None, help="strips per page"),
        "seed": lambda: sub.add_argument("--seed", type=int, default=None),
        "epsilon": lambda: sub.add_argument(
            "--epsilon", type=float, default=None, help="blank-strip ink density threshold"
        ),
        "threshold": lambda: sub.add_argument(
            "--threshold", type=int, default=None, help="binarization intensity threshold"
        ),
        "gap": lambda: sub.add_argument("--gap", type=int, default=None, help="sheet spacing"),
        "early": lambda: sub.add_argument(
            "--no-early-stop", action="store_true", default=None, dest="no_early_stop"
        ),
        "orient": lambda: sub.add_argument(
            "--no-orientation", action="store_true", default=None, dest="no_orientation"
        ),
        "class": lambda: sub.add_argument(
            "--class", choices=DOC_CLASSES, default=None, dest="doc_class"
        ),
        "pages": lambda: sub.add_argument("--pages", type=int, default=None),
        "width": lambda: sub.add_argument("--width", type=int, default=None),
        "height": lambda: sub.add_argument("--height", type=int, default=None),
        "out": lambda: sub.add_argument("--out", default=None, help="output directory"),
        "verbose": lambda: sub.add_argument(
            "--verbose", action="store_true", default=None
        ),
        "config": lambda: sub.add_argument(
            "--config", default=None, help="JSON config file; flags override it"
        ),
    }
    for name in names:
        flags[name]()


def build_parser() -> _Parser:
    parser = _Parser(prog="unshred", description=__doc__)
    subs = parser.add_subparsers(dest="command", required=True)

    p = subs.add_parser("shred", help="cut pages into shuffled strips")
    p.add_argument("page_files", nargs="*", help="input page PGM files")
    p.add_argument(
        "--generate",
        choices=DOC_CLASSES,
        default=None,
        help="generate synthetic pages instead of reading files",
    )
    _add_common(p, "m", "seed", "threshold", "pages", "width", "height", "out", "config")
    p.set_defaults(func=cmd_shred)

    p = subs.add_parser("compose", help="lay strips onto a black scan sheet")
    p.add_argument("manifest", help="strips.json from the shred stage")
    _add_common(p, "gap", "seed", "out", "config")
    p.set_defaults(func=cmd_compose)

    p = subs.add_parser("segment", help="recover strips from a scan sheet")
    p.add_argument("sheet", help="sheet PGM file")
    _add_common(p, "threshold", "out", "config")
    p.set_defaults(func=cmd_segment)

    p = subs.add_parser("reconstruct", help="match strips and stitch pages")
    p.add_argument("manifest", help="strips.json or segments.json")
    _add_common(
        p, "m", "epsilon", "early", "orient", "out", "verbose", "config"
    )
    p.set_defaults(func=cmd_reconstruct)

    p = subs.add_parser("evaluate", help="score a reconstruction against ground truth")
    p.add_argument("reconstruction", help="reconstruction.json")
    p.add_argument("ground_truth", help="strips.json with provenance")
    _add_common(p, "class", "out", "config")
    p.set_defaults(func=cmd_evaluate)

    p = subs.add_parser("pipeline", help="run every stage end to end")
    _add_common(
        p,
        "m",
        "seed",
        "epsilon",
        "threshold",
        "gap",
        "early",
        "orient",
        "class",
        "pages",
        "width",
        "height",
        "out",
        "verbose",
        "config",
    )
    p.set_defaults(func=cmd_pipeline)
    return parser


def resolve_config(args) -> PipelineConfig:
    doc = {}
    if getattr(args, "config", None):
        doc = read_json(args.config)
        if not isinstance(doc, dict):
            raise _UsageError(f"config file {args.config} must hold a JSON object")
    config = PipelineConfig.from_dict(doc)

    direct = {
        "m": "m",
        "seed": "seed",
        "epsilon": "epsilon",
        "threshold": "threshold",
        "gap": "gap",
        "doc_class": "doc_class",
        "pages": "pages",
        "width": "page_width",
        "height": "page_height",
        "out": "out_dir",
        "verbose": "verbose",
    }
    overrides = {}
    for attr, field_name in direct.items():
        value = getattr(args, attr, None)
        if value is not None:
            overrides[field_name] = value
    if getattr(args, "no_early_stop", None):
        overrides["early_stop"] = False
    if getattr(args, "no_orientation", None):
        overrides["orientation_hints"] = False
    return replace(config, **overrides)


def _require_out(args) -> Path:
    if not getattr(args, "out", None):
        raise _UsageError("--out DIR is required for this command")
    return Path(args.out)


def cmd_shred(args, writer) -> int:
    config = resolve_config(args)
    out = _require_out(args)
    if args.generate:
        pages = [
            generate_corpus(
                args.generate, config.page_width, config.page_height, config.seed + i
            )
            for i in range(config.pages)
        ]
    elif args.page_files:
        pages = [binarize(load_pgm(p), config.threshold) for p in args.page_files]
    else:
        raise _UsageError("either page PGM files or --generate CLASS is required")
    strip_set, gt = shred_document(pages, config.m, config.seed)
    save_shredded(out, strip_set, gt, writer=writer)
    print(f"shredded {gt.pages} pages into {len(strip_set.strips)} strips -> {out}")
    return 0


def cmd_compose(args, writer) -> int:
    config = resolve_config(args)
    out = _require_out(args)
    strip_set, _ = load_shredded(args.manifest)
    sheet, layout = compose_sheet_with_layout(strip_set, config.gap, config.seed)
    writer.write_bytes(out / "sheet.pgm", write_pgm(sheet))
    writer.write_json(
        out / "layout.json",
        [
            {"id": sid, "left": left, "top": top, "width": width, "height": height}
            for sid, left, top, width, height in layout
        ],
    )
    print(f"composed {len(layout)} strips onto {sheet.shape[1]}x{sheet.shape[0]} sheet -> {out}")
    return 0


def cmd_segment(args, writer) -> int:
    config = resolve_config(args)
    out = _require_out(args)
    sheet = load_pgm(args.sheet)
    segments = segment_sheet(sheet, ink_threshold=config.threshold)
    save_segments(out, segments, writer=writer)
    print(f"segmented {len(segments)} strips -> {out}")
    return 0


def _load_strips_any(path):
    """Load strips from either a shred manifest or a segment manifest.

    Returns (strips, default_m or None).
    """
    doc = read_json(path)
    if isinstance(doc, dict) and "strips" in doc:
        strip_set, _ = load_shredded(path)
        return list(strip_set.strips), int(doc["strips_per_page"])
    segments = load_segments(path)
    return [Strip(seg.id, seg.raster) for seg in segments], None


def cmd_reconstruct(args, writer) -> int:
    config = resolve_config(args)
    out = _require_out(args)
    strips, manifest_m = _load_strips_any(args.manifest)
    m = args.m if args.m is not None else manifest_m
    if m is None:
        raise _UsageError("--m is required when the manifest does not carry strips_per_page")

    kept, _ = remove_blanks(strips, config.epsilon)
    corrected = []
    oriented = []
    for s in kept:
        if config.orientation_hints:
            o = orient_strip(s)
            if o.status is OrientationStatus.CORRECTED:
                corrected.append(s.id)
        else:
            o = OrientedStrip(s, OrientationStatus.AMBIGUOUS)
        oriented.append(o)

    trace_lines = []
    trace = None
    if config.verbose:
        def trace(record):
            trace_lines.append(json.dumps(record, sort_keys=True))

    table = build_score_table(
        oriented,
        build_template_bank(),
        early_stop=config.early_stop,
        use_orientation_hints=config.orientation_hints,
        trace=trace,
    )
    rec = greedy_assemble(table, m)
    by_id = {o.strip.id: o.strip for o in oriented}
    for i, chain in enumerate(rec.chains):
        writer.write_bytes(
            out / "stitched" / f"page_{i:02d}.pgm",
            write_pgm(to_gray(stitch(chain, by_id))),
        )
    rec_out = apply_corrections(rec, corrected)
    writer.write_json(
        out / "reconstruction.json",
        serialize_reconstruction(
            rec_out,
            evaluations=table.evaluations,
            early_stop=config.early_stop,
            hints=config.orientation_hints,
        ),
    )
    if config.verbose:
        writer.write_text(out / "trace.jsonl", "".join(line + "\n" for line in trace_lines))
    print(
        f"reconstructed {len(rec.chains)} chains"
        f" ({len(rec.unplaced)} unplaced, {table.evaluations} evaluations) -> {out}"
    )
    return 0


def cmd_evaluate(args, writer) -> int:
    rec = deserialize_reconstruction(read_json(args.reconstruction))
    _, gt = load_shredded(args.ground_truth)
    label = args.doc_class if args.doc_class else "unknown"
    report = evaluate_reconstruction(rec, gt, label)
    table = format_report_table([report])
    sys.stdout.write(table)
    if getattr(args, "out", None):
        writer.write_json(Path(args.out) / "report.json", report.to_dict())
    return 0


def cmd_pipeline(args, writer) -> int:
    config = resolve_config(args)
    results = run_pipeline(config, writer=writer)
    reports = [results[c].report for c in results]
    sys.stdout.write(format_report_table(reports))
    return 0


def main(argv=None) -> int:
    writer = ArtifactWriter()
    try:
        parser = build_parser()
        args = parser.parse_args(argv)
        return args.func(args, writer)
    except _UsageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        writer.cleanup()
        return 1
    except (UnshredError, FileNotFoundError, IsADirectoryError, json.JSONDecodeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        writer.cleanup()
        return 1
    except Exception as exc:  # noqa: BLE001 - anything else is an internal bug
        print(f"internal error: {type(exc).__name__}: {exc}", file=sys.stderr)
        writer.cleanup()
        return 2


if __name__ == "__main__":
    sys.exit(main())
