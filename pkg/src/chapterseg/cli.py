"""Command-line interface wiring the pipeline end to end.

Subcommands: generate, annotate, strip, segment, evaluate, trends,
structure, export-rules.  All outputs are written atomically (temp file
plus rename) and deterministically (sorted JSON keys, fixed float
formats), so identical inputs and seeds give byte-identical outputs.
"""

from __future__ import annotations

import argparse
import csv
import json
import os
import statistics
import sys
from concurrent.futures import ProcessPoolExecutor
from pathlib import Path

from . import metrics as metrics_mod
from . import scores as scores_mod
from . import synth, woc
from .corpus import GroundTruth, load_book, load_ground_truth
from .dp import DpConfig, segment as dp_segment
from .errors import ChaptersegError, SchemaError
from .pipeline import (
    Header,
    HeaderAnnotation,
    annotate_book,
    evaluate_spans,
    split_lines,
    stage_metrics,
    strip_book,
)
from .rules import generate_rules, rules_to_json
from .segmentation import Segmentation
from .woc import WocConfig


def write_atomic(path: Path, data: str) -> None:
    """Write via temp file + rename so outputs never appear half-written."""
    path.parent.mkdir(parents=True, exist_ok=True)
    tmp = path.with_name(path.name + f".tmp{os.getpid()}")
    tmp.write_text(data, encoding="utf-8")
    os.replace(tmp, path)


def dump_json(payload) -> str:
    return json.dumps(payload, sort_keys=True, indent=1) + "\n"


def book_paths(spec: str) -> list[Path]:
    p = Path(spec)
    if p.is_dir():
        return sorted(p.glob("*.txt"))
    if p.is_file():
        return [p]
    paths = sorted(Path().glob(spec))
    if not paths:
        raise FileNotFoundError(f"no books match {spec!r}")
    return paths


def _truth_path(truth_dir: str | None, book_id: str) -> Path | None:
    if truth_dir is None:
        return None
    path = Path(truth_dir) / f"{book_id}.json"
    return path if path.exists() else None


def annotation_from_dict(book, data: dict, rules) -> HeaderAnnotation:
    """Rebuild an annotation from its JSON form."""
    rules_by_id = {r.id: r for r in rules}
    lines = split_lines(book.raw_text)
    headers = []
    for item in data["headers"]:
        start, end = item["span"]
        line_index = next(
            ln.index for ln in lines if ln.start <= start <= ln.end
        )
        rule = rules_by_id[item["rule_id"]]
        headers.append(
            Header(
                line_index=line_index,
                span=(start, end),
                rule_id=rule.id,
                rule_index=rule.index,
                number=item.get("number"),
                number_format=rule.number_kind,
                title=item.get("title"),
                keyword=None,
            )
        )
    return HeaderAnnotation(
        book_id=data["book_id"],
        front_matter_end=data["front_matter_end"],
        headers=tuple(headers),
    )


# --------------------------------------------------------------------------
# subcommands

def cmd_generate(args) -> int:
    profiles = {
        "standard": synth.STANDARD_PROFILE,
        "two-disjoint": synth.TWO_DISJOINT_PROFILE,
        "long": synth.LONG_PROFILE,
    }
    profile = profiles[args.profile]
    if args.decoys:
        profile = synth.SynthProfile(
            **{**profile.__dict__, "decoys_per_book": args.decoys}
        )
    if args.trend:
        profile = synth.SynthProfile(**{**profile.__dict__, "trend": True})
    synth.generate_corpus(
        args.out, args.books, args.seed, profile, min_formats=args.min_formats
    )
    print(f"generated {args.books} books under {args.out}")
    return 0


def cmd_export_rules(args) -> int:
    write_atomic(Path(args.out), rules_to_json(generate_rules()))
    print(f"wrote rule inventory to {args.out}")
    return 0


def cmd_structure(args) -> int:
    out = Path(args.out)
    for path in book_paths(args.books):
        book = load_book(path)
        write_atomic(out / f"{book.id}.json", dump_json(book.structure_dict()))
    return 0


def _load_line_scores(scores_dir: str | None, book) -> list[float] | None:
    if scores_dir is None:
        return None
    path = Path(scores_dir) / f"{book.id}.json"
    if not path.exists():
        return None
    data = json.loads(path.read_text(encoding="utf-8"))
    scores_mod.validate_line_scores(data)
    if data["book_id"] != book.id:
        raise SchemaError(f"score file {path} is for {data['book_id']!r}")
    return [float(s) for s in data["line_scores"]]


def _annotate_one(path: Path, scores_dir, truth_dir, out_dir, rules):
    book = load_book(path)
    line_scores = _load_line_scores(scores_dir, book)
    ann = annotate_book(book, rules, line_scores)
    write_atomic(
        Path(out_dir) / "annotations" / f"{book.id}.json",
        dump_json(ann.to_dict()),
    )
    truth_path = _truth_path(truth_dir, book.id)
    if truth_path is None:
        return book.id, None
    truth = load_ground_truth(truth_path)
    return book.id, stage_metrics(ann, truth)


def cmd_annotate(args) -> int:
    rules = generate_rules()
    out = Path(args.out)
    failures = []
    rows = []
    book_list = book_paths(args.books)
    if args.jobs > 1:
        with ProcessPoolExecutor(max_workers=args.jobs) as pool:
            futures = [
                pool.submit(
                    _annotate_one, p, args.scores, args.truth, args.out, rules
                )
                for p in book_list
            ]
            results = []
            for p, f in zip(book_list, futures):
                try:
                    results.append(f.result())
                except Exception as exc:
                    failures.append((p, exc))
    else:
        results = []
        for p in book_list:
            try:
                results.append(
                    _annotate_one(p, args.scores, args.truth, args.out, rules)
                )
            except Exception as exc:
                failures.append((p, exc))
    evaluated = [(bid, m) for bid, m in results if m is not None]
    skipped = len(results) - len(evaluated)
    if skipped:
        print(
            f"warning: {skipped} book(s) had no ground truth; "
            "evaluation skipped for them",
            file=sys.stderr,
        )
    if evaluated:
        lines = ["Stage,Precision,Recall,F1"]
        md = ["| Stage | Precision | Recall | F1 |", "|---|---|---|---|"]
        for si, stage in enumerate(("stage1", "stage2", "stage3"), start=1):
            p = statistics.mean(m[stage][0] for _, m in evaluated)
            r = statistics.mean(m[stage][1] for _, m in evaluated)
            f1 = statistics.mean(m[stage][2] for _, m in evaluated)
            lines.append(f"{si},{p:.4f},{r:.4f},{f1:.4f}")
            md.append(f"| {si} | {p:.2f} | {r:.2f} | {f1:.2f} |")
        write_atomic(out / "header_stages.csv", "\n".join(lines) + "\n")
        write_atomic(out / "header_stages.md", "\n".join(md) + "\n")
        print("\n".join(lines))
    return _finish(out, failures)


def _finish(out: Path, failures) -> int:
    if failures:
        log = "".join(f"{path}: {exc}\n" for path, exc in failures)
        write_atomic(out / "errors.log", log)
        for path, exc in failures:
            print(f"error: {path}: {exc}", file=sys.stderr)
        return 2
    return 0


def cmd_strip(args) -> int:
    rules = generate_rules()
    out = Path(args.out)
    failures = []
    for path in book_paths(args.books):
        try:
            book = load_book(path)
            ann_path = Path(args.annotations) / f"{book.id}.json"
            ann = annotation_from_dict(
                book, json.loads(ann_path.read_text(encoding="utf-8")), rules
            )
            result = strip_book(book, ann)
            write_atomic(out / "stripped" / f"{book.id}.txt", result.text + "\n")
            write_atomic(
                out / "truth" / f"{book.id}.json",
                dump_json(result.ground_truth.to_dict()),
            )
        except Exception as exc:
            failures.append((path, exc))
    return _finish(out, failures)


def _woc_candidates(book, window: int):
    series = woc.density_series(book, WocConfig(window=window))
    if not series.minima:
        return None, series
    return scores_mod.normalize_prominences(list(series.minima), book.id), series


def _breaks_for(args, book, truth: GroundTruth | None, model) -> int:
    if args.estimate:
        return -1  # resolved by caller with candidate features
    if args.breaks == "truth":
        if truth is None:
            raise ChaptersegError(f"no truth for {book.id} (--breaks truth)")
        return len(truth.chapter_breaks)
    return int(args.breaks)


def cmd_segment(args) -> int:
    out = Path(args.out)
    failures = []
    rows = []  # (candidate_count, sentence_count, true_breaks) for --estimate
    per_book = []
    for path in book_paths(args.books):
        try:
            book = load_book(path)
            truth_path = _truth_path(args.truth, book.id)
            truth = load_ground_truth(truth_path) if truth_path else None
            if args.method == "woc":
                series, density = _woc_candidates(book, args.window)
                if series is None:
                    raise ChaptersegError(f"{book.id}: no density minima")
                if args.dump_density:
                    write_atomic(
                        out / "density" / f"{book.id}.csv",
                        woc.density_csv(density),
                    )
            else:
                score_path = Path(args.scores) / f"{book.id}.json"
                raw = scores_mod.load_scores(score_path, book)
                cfg = scores_mod.TransformConfig(
                    c=args.c, threshold=args.threshold
                )
                series = scores_mod.log_transform(raw, cfg, lenient=True)
            per_book.append((book, truth, series))
            if truth is not None:
                rows.append(
                    (len(series.entries), book.n_sentences,
                     len(truth.chapter_breaks))
                )
        except Exception as exc:
            failures.append((path, exc))

    model = None
    if args.estimate:
        if len(rows) < 3:
            raise ChaptersegError("--estimate needs >= 3 books with truth")
        model, report = metrics_mod.fit_count_regression(rows, seed=args.seed)
        base_model, base_report = metrics_mod.fit_count_regression(
            rows, sentence_only=True, seed=args.seed
        )
        label = (
            f"WOC (win={args.window})" if args.method == "woc"
            else f"scores (thr={args.threshold})"
        )
        write_atomic(
            out / "regression.json",
            dump_json(
                {
                    "algorithm": label,
                    "mse": report.mse,
                    "mae": report.mae,
                    "r2": report.r2,
                    "baseline": {
                        "algorithm": "Baseline (# sent)",
                        "mse": base_report.mse,
                        "mae": base_report.mae,
                        "r2": base_report.r2,
                    },
                }
            ),
        )

    for book, truth, series in per_book:
        try:
            if args.estimate:
                p = model.predict((len(series.entries), book.n_sentences))
            else:
                p = _breaks_for(args, book, truth, model)
            seg = dp_segment(
                series, DpConfig(alpha=args.alpha, p=p), book.n_sentences
            )
            write_atomic(
                out / "segments" / f"{book.id}.json",
                dump_json(
                    {
                        "book_id": book.id,
                        "alpha": args.alpha,
                        "breaks": list(seg.breaks),
                        "total_cost": seg.total_cost,
                        "flags": list(seg.flags),
                    }
                ),
            )
        except Exception as exc:
            failures.append((Path(book.id), exc))
    return _finish(out, failures)


def cmd_evaluate(args) -> int:
    out = Path(args.out)
    failures = []
    rows = []
    for path in book_paths(args.books):
        try:
            book = load_book(path)
            truth = load_ground_truth(Path(args.truth) / f"{book.id}.json")
            seg_data = json.loads(
                (Path(args.segments) / f"{book.id}.json").read_text(
                    encoding="utf-8"
                )
            )
            hyp = Segmentation(breaks=tuple(seg_data["breaks"]))
            ref = Segmentation(breaks=tuple(truth.chapter_breaks))
            n = book.n_sentences
            k = metrics_mod.default_window(ref, n).k
            pk_v = metrics_mod.pk(ref, hyp, n, k)
            wd_v = metrics_mod.window_diff(ref, hyp, n, k)
            prec, rec, f1 = metrics_mod.exact_f1(ref, hyp)
            rows.append((book.id, n, k, pk_v, wd_v, prec, rec, f1))
        except Exception as exc:
            failures.append((path, exc))
    if rows:
        lines = ["book_id,n_sentences,k,pk,window_diff,precision,recall,f1"]
        for r in rows:
            lines.append(
                f"{r[0]},{r[1]},{r[2]},{r[3]:.6f},{r[4]:.6f},"
                f"{r[5]:.6f},{r[6]:.6f},{r[7]:.6f}"
            )
        write_atomic(out / "eval_per_book.csv", "\n".join(lines) + "\n")
        mean = lambda i: statistics.mean(r[i] for r in rows)  # noqa: E731
        md = [
            "| Algorithm | Pk | WD | F1 |",
            "|---|---|---|---|",
            f"| {args.algorithm} | {mean(3):.3f} | {mean(4):.3f} "
            f"| {mean(7):.3f} |",
        ]
        write_atomic(out / "eval_report.md", "\n".join(md) + "\n")
        regression = None
        reg_path = (
            Path(args.regression)
            if args.regression
            else Path(args.segments).parent / "regression.json"
        )
        if reg_path.exists():
            regression = json.loads(reg_path.read_text(encoding="utf-8"))
        if regression:
            t4 = [
                "| Algorithm | MSE | MAE | R2 | Pk | WD | F1 |",
                "|---|---|---|---|---|---|---|",
                (
                    f"| {regression['baseline']['algorithm']} "
                    f"| {regression['baseline']['mse']:.2f} "
                    f"| {regression['baseline']['mae']:.3f} "
                    f"| {regression['baseline']['r2']:.2f} | - | - | - |"
                ),
                (
                    f"| {regression['algorithm']} | {regression['mse']:.2f} "
                    f"| {regression['mae']:.3f} | {regression['r2']:.2f} "
                    f"| {mean(3):.2f} | {mean(4):.2f} | {mean(7):.2f} |"
                ),
            ]
            write_atomic(out / "regression_report.md", "\n".join(t4) + "\n")
        print("\n".join(md))
    return _finish(out, failures)


def cmd_trends(args) -> int:
    out = Path(args.out)
    rules = generate_rules()
    label_by_id = {r.id: r.format_label for r in rules}
    years = {}
    with open(args.metadata, newline="", encoding="utf-8") as fh:
        for row in csv.DictReader(fh):
            year = row.get("author_birth_year", "").strip()
            if year:
                years[row["book_id"]] = int(year)
    chapter_rows = []
    histogram: dict[str, int] = {}
    excluded = 0
    for path in sorted(Path(args.annotations).glob("*.json")):
        data = json.loads(path.read_text(encoding="utf-8"))
        book_id = data["book_id"]
        counts: dict[str, int] = {}
        for h in data["headers"]:
            counts[h["rule_id"]] = counts.get(h["rule_id"], 0) + 1
        if counts:
            best = max(counts.values())
            modal = sorted(rid for rid, c in counts.items() if c == best)[0]
            label = label_by_id.get(modal, modal)
            histogram[label] = histogram.get(label, 0) + 1
        if book_id not in years:
            excluded += 1
            continue
        chapter_rows.append((book_id, years[book_id], len(data["headers"])))
    if excluded:
        print(
            f"excluded {excluded} book(s) without birth year",
            file=sys.stderr,
        )
    lines = ["book_id,birth_year,chapters"]
    lines += [f"{b},{y},{c}" for b, y, c in sorted(chapter_rows)]
    write_atomic(out / "chapters_by_year.csv", "\n".join(lines) + "\n")
    by_decade: dict[int, list[int]] = {}
    for _, year, chapters in chapter_rows:
        by_decade.setdefault(year // 10 * 10, []).append(chapters)
    lines = ["decade,median_chapters,n_books"]
    for decade in sorted(by_decade):
        med = statistics.median(by_decade[decade])
        lines.append(f"{decade},{med},{len(by_decade[decade])}")
    write_atomic(out / "decade_medians.csv", "\n".join(lines) + "\n")
    lines = ["format,books"]
    for label in sorted(histogram, key=lambda k: (-histogram[k], k)):
        lines.append(f"{label},{histogram[label]}")
    write_atomic(out / "rule_format_histogram.csv", "\n".join(lines) + "\n")
    return 0


# --------------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(
        prog="chapterseg",
        description="Chapter header annotation and boundary segmentation",
    )
    sub = ap.add_subparsers(dest="command", required=True)

    g = sub.add_parser("generate", help="write a synthetic corpus")
    g.add_argument("--out", required=True)
    g.add_argument("--books", type=int, default=50)
    g.add_argument("--seed", type=int, default=0)
    g.add_argument(
        "--profile", choices=("standard", "two-disjoint", "long"),
        default="standard",
    )
    g.add_argument("--decoys", type=int, default=0)
    g.add_argument("--trend", action="store_true")
    g.add_argument("--min-formats", type=int, default=0)
    g.set_defaults(func=cmd_generate)

    a = sub.add_parser("annotate", help="annotate chapter headers")
    a.add_argument("--books", required=True)
    a.add_argument("--out", required=True)
    a.add_argument("--truth", default=None)
    a.add_argument("--scores", default=None, help="line-score JSON dir")
    a.add_argument("--jobs", type=int, default=1)
    a.set_defaults(func=cmd_annotate)

    s = sub.add_parser("strip", help="remove headers and front matter")
    s.add_argument("--books", required=True)
    s.add_argument("--annotations", required=True)
    s.add_argument("--out", required=True)
    s.set_defaults(func=cmd_strip)

    seg = sub.add_parser("segment", help="predict chapter breaks")
    seg.add_argument("--books", required=True, help="stripped books")
    seg.add_argument("--method", choices=("woc", "scores"), required=True)
    seg.add_argument("--out", required=True)
    seg.add_argument("--window", type=int, default=200,
                     choices=woc.SUPPORTED_WINDOWS)
    seg.add_argument("--alpha", type=float, default=0.8)
    seg.add_argument("--threshold", type=float, default=0.9)
    seg.add_argument("--c", type=float, default=10.0)
    seg.add_argument("--scores", default=None, help="gap-score JSON dir")
    seg.add_argument("--truth", default=None)
    seg.add_argument("--breaks", default=None,
                     help="break count, or 'truth' to use per-book truth")
    seg.add_argument("--estimate", action="store_true",
                     help="estimate break count by regression (needs --truth)")
    seg.add_argument("--seed", type=int, default=0)
    seg.add_argument("--dump-density", action="store_true")
    seg.set_defaults(func=cmd_segment)

    ev = sub.add_parser("evaluate", help="score predicted segmentations")
    ev.add_argument("--books", required=True, help="stripped books")
    ev.add_argument("--segments", required=True)
    ev.add_argument("--truth", required=True)
    ev.add_argument("--out", required=True)
    ev.add_argument("--algorithm", default="segmentation")
    ev.add_argument("--regression", default=None)
    ev.set_defaults(func=cmd_evaluate)

    t = sub.add_parser("trends", help="chapter-count and format reports")
    t.add_argument("--annotations", required=True)
    t.add_argument("--metadata", required=True)
    t.add_argument("--out", required=True)
    t.set_defaults(func=cmd_trends)

    st = sub.add_parser("structure", help="dump sentence/paragraph indexes")
    st.add_argument("--books", required=True)
    st.add_argument("--out", required=True)
    st.set_defaults(func=cmd_structure)

    er = sub.add_parser("export-rules", help="dump the rule inventory")
    er.add_argument("--out", required=True)
    er.set_defaults(func=cmd_export_rules)
    return ap


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    if args.command == "segment":
        if args.estimate and args.breaks is not None:
            print("--breaks and --estimate are mutually exclusive",
                  file=sys.stderr)
            return 2
        if not args.estimate and args.breaks is None:
            print("one of --breaks or --estimate is required", file=sys.stderr)
            return 2
        if args.method == "scores" and not args.scores:
            print("--method scores requires --scores", file=sys.stderr)
            return 2
    try:
        return args.func(args)
    except ChaptersegError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
