import subprocess
import sys
from pathlib import Path

import pytest

from chapterscorer.config import ScorerConfig

# from-scratch initialization needs more passes than the pretrained
# default of 4 epochs; see README
TOY_CONFIG = ScorerConfig(epochs=30, seed=0)


def run_primary(*argv):
    """Invoke the segmentation pipeline CLI (the external interface)."""
    proc = subprocess.run(
        ["chapterseg", *map(str, argv)], capture_output=True, text=True
    )
    if proc.returncode != 0:
        raise RuntimeError(
            f"chapterseg {argv[0]} failed:\n{proc.stdout}\n{proc.stderr}"
        )
    return proc


@pytest.fixture(scope="session")
def toy_corpus(tmp_path_factory):
    """Five-book toy corpus prepared entirely through the primary CLI."""
    root = tmp_path_factory.mktemp("toy")
    corpus = root / "corpus"
    work = root / "work"
    run_primary("generate", "--out", corpus, "--books", "5", "--seed", "101")
    run_primary("annotate", "--books", corpus / "books", "--out", work)
    run_primary(
        "strip", "--books", corpus / "books",
        "--annotations", work / "annotations", "--out", work,
    )
    run_primary(
        "structure", "--books", work / "stripped", "--out", work / "structure"
    )
    return {
        "books": corpus / "books",
        "book_truth": corpus / "truth",
        "stripped": work / "stripped",
        "stripped_truth": work / "truth",
        "structure": work / "structure",
        "root": root,
    }


@pytest.fixture(scope="session")
def trained_models(toy_corpus, tmp_path_factory):
    from chapterscorer.training import train_break_model, train_header_model

    out = tmp_path_factory.mktemp("models")
    train_header_model(
        toy_corpus["books"], toy_corpus["book_truth"],
        out / "headers", TOY_CONFIG,
    )
    train_break_model(
        toy_corpus["stripped"], toy_corpus["stripped_truth"],
        toy_corpus["structure"], out / "breaks", TOY_CONFIG,
    )
    return out
