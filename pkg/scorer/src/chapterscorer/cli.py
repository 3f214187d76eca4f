"""chapterscorer command line: train and apply the two scorers."""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from .config import load_config
from .inference import (
    score_break_gaps,
    score_header_lines,
    write_gap_scores,
    write_line_scores,
)
from .modeling import load_artifact
from .training import train_break_model, train_header_model


def cmd_train_headers(args) -> int:
    cfg = load_config(args.config)
    stats = train_header_model(args.books, args.truth, args.out, cfg)
    print(f"trained header model on {stats['samples']} samples -> {args.out}")
    return 0


def cmd_train_breaks(args) -> int:
    cfg = load_config(args.config)
    stats = train_break_model(
        args.stripped, args.truth, args.structure, args.out, cfg
    )
    print(f"trained break model on {stats['samples']} samples -> {args.out}")
    return 0


def cmd_score_headers(args) -> int:
    model, tok, cfg = load_artifact(args.model, "headers")
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    for path in sorted(Path(args.books).glob("*.txt")):
        text = path.read_text(encoding="utf-8")
        scores = score_header_lines(text, model, tok, cfg)
        write_line_scores(path.stem, scores, out / f"{path.stem}.json")
    return 0


def cmd_score_breaks(args) -> int:
    model, tok, cfg = load_artifact(args.model, "breaks")
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    for path in sorted(Path(args.stripped).glob("*.txt")):
        structure = json.loads(
            (Path(args.structure) / f"{path.stem}.json").read_text(
                encoding="utf-8"
            )
        )
        text = path.read_text(encoding="utf-8")
        entries = score_break_gaps(text, structure, model, tok, cfg)
        write_gap_scores(path.stem, entries, out / f"{path.stem}.json")
    return 0


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(
        prog="chapterscorer",
        description="Header-line and chapter-break confidence scorers",
    )
    sub = ap.add_subparsers(dest="command", required=True)

    th = sub.add_parser("train-headers")
    th.add_argument("--books", required=True, help="raw book texts")
    th.add_argument("--truth", required=True, help="ground-truth JSON dir")
    th.add_argument("--out", required=True, help="artifact dir")
    th.add_argument("--config", default=None, help="YAML config")
    th.set_defaults(func=cmd_train_headers)

    tb = sub.add_parser("train-breaks")
    tb.add_argument("--stripped", required=True, help="cue-free book texts")
    tb.add_argument("--truth", required=True)
    tb.add_argument("--structure", required=True, help="structure JSON dir")
    tb.add_argument("--out", required=True)
    tb.add_argument("--config", default=None)
    tb.set_defaults(func=cmd_train_breaks)

    sh = sub.add_parser("score-headers")
    sh.add_argument("--books", required=True)
    sh.add_argument("--model", required=True)
    sh.add_argument("--out", required=True)
    sh.set_defaults(func=cmd_score_headers)

    sb = sub.add_parser("score-breaks")
    sb.add_argument("--stripped", required=True)
    sb.add_argument("--structure", required=True)
    sb.add_argument("--model", required=True)
    sb.add_argument("--out", required=True)
    sb.set_defaults(func=cmd_score_breaks)
    return ap


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except Exception as exc:  # surfaced as exit code for scripting
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
