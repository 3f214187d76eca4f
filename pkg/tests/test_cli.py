import json

import pytest

from chapterseg import cli, corpus, synth
from chapterseg.rules import best_match, generate_rules


def run(*argv) -> int:
    return cli.main([str(a) for a in argv])


@pytest.fixture(scope="module")
def small_corpus(tmp_path_factory):
    out = tmp_path_factory.mktemp("corpus")
    synth.generate_corpus(out, n_books=5, seed=7)
    return out


@pytest.fixture(scope="module")
def annotated(small_corpus, tmp_path_factory):
    work = tmp_path_factory.mktemp("work")
    code = run(
        "annotate", "--books", small_corpus / "books",
        "--truth", small_corpus / "truth", "--out", work,
    )
    assert code == 0
    return work


def test_annotate_outputs_and_stage_table(annotated, small_corpus):
    anns = sorted((annotated / "annotations").glob("*.json"))
    assert len(anns) == 5
    data = json.loads(anns[0].read_text())
    assert set(data) == {"book_id", "front_matter_end", "headers"}
    assert set(data["headers"][0]) == {"span", "rule_id", "number", "title"}
    stage_csv = (annotated / "header_stages.csv").read_text().strip().split("\n")
    assert stage_csv[0] == "Stage,Precision,Recall,F1"
    row3 = stage_csv[3].split(",")
    assert row3[0] == "3" and float(row3[3]) == 1.0


def test_annotate_without_truth_warns(small_corpus, tmp_path, capsys):
    code = run("annotate", "--books", small_corpus / "books", "--out", tmp_path)
    assert code == 0
    err = capsys.readouterr().err
    assert "no ground truth" in err
    assert len(list((tmp_path / "annotations").glob("*.json"))) == 5


def test_annotate_malformed_truth_exits_2(small_corpus, tmp_path, capsys):
    bad_truth = tmp_path / "truth"
    bad_truth.mkdir()
    books = sorted((small_corpus / "books").glob("*.txt"))
    (bad_truth / f"{books[0].stem}.json").write_text("{not json")
    code = run(
        "annotate", "--books", small_corpus / "books",
        "--truth", bad_truth, "--out", tmp_path / "out",
    )
    assert code == 2
    err = capsys.readouterr().err
    assert books[0].stem in err
    assert (tmp_path / "out" / "errors.log").exists()


@pytest.fixture(scope="module")
def stripped(small_corpus, annotated, tmp_path_factory):
    work = tmp_path_factory.mktemp("stripwork")
    code = run(
        "strip", "--books", small_corpus / "books",
        "--annotations", annotated / "annotations", "--out", work,
    )
    assert code == 0
    return work


def test_strip_outputs_are_cue_free(stripped):
    inventory = generate_rules()
    files = sorted((stripped / "stripped").glob("*.txt"))
    assert len(files) == 5
    for path in files:
        for line in path.read_text().splitlines():
            if line.strip():
                assert best_match(line, inventory) is None, (path, line)


def test_strip_truth_matches_generator(stripped, small_corpus):
    for truth_path in sorted((stripped / "truth").glob("*.json")):
        produced = json.loads(truth_path.read_text())
        original = json.loads(
            (small_corpus / "truth" / truth_path.name).read_text()
        )
        assert produced["chapter_breaks"] == original["chapter_breaks"]


def test_segment_woc_and_evaluate(stripped, tmp_path_factory):
    work = tmp_path_factory.mktemp("segwork")
    code = run(
        "segment", "--books", stripped / "stripped", "--method", "woc",
        "--window", "100", "--alpha", "0.8", "--breaks", "truth",
        "--truth", stripped / "truth", "--out", work,
    )
    assert code == 0
    segs = sorted((work / "segments").glob("*.json"))
    assert len(segs) == 5
    data = json.loads(segs[0].read_text())
    assert {"book_id", "alpha", "breaks", "total_cost"} <= set(data)
    code = run(
        "evaluate", "--books", stripped / "stripped",
        "--segments", work / "segments", "--truth", stripped / "truth",
        "--out", work, "--algorithm", "WOC+DP",
    )
    assert code == 0
    report = (work / "eval_report.md").read_text()
    assert "WOC+DP" in report
    per_book = (work / "eval_per_book.csv").read_text().strip().split("\n")
    assert len(per_book) == 6


def test_segment_scores_method(stripped, tmp_path_factory):
    work = tmp_path_factory.mktemp("scorework")
    scores_dir = work / "scores"
    scores_dir.mkdir(parents=True)
    for path in sorted((stripped / "stripped").glob("*.txt")):
        book = corpus.load_book(path)
        truth = json.loads((stripped / "truth" / f"{book.id}.json").read_text())
        true_breaks = set(truth["chapter_breaks"])
        entries = [
            [g, 0.995 if g in true_breaks else 0.2]
            for g in book.paragraph_breaks
        ]
        (scores_dir / f"{book.id}.json").write_text(
            json.dumps({"book_id": book.id, "entries": entries})
        )
    code = run(
        "segment", "--books", stripped / "stripped", "--method", "scores",
        "--scores", scores_dir, "--threshold", "0.9", "--c", "10",
        "--alpha", "0.8", "--breaks", "truth", "--truth", stripped / "truth",
        "--out", work,
    )
    assert code == 0
    code = run(
        "evaluate", "--books", stripped / "stripped",
        "--segments", work / "segments", "--truth", stripped / "truth",
        "--out", work, "--algorithm", "scores+DP",
    )
    assert code == 0
    per_book = (work / "eval_per_book.csv").read_text().strip().split("\n")
    f1_values = [float(row.split(",")[-1]) for row in per_book[1:]]
    assert all(f1 == 1.0 for f1 in f1_values)  # scores point at true gaps


def test_segment_estimate_regression_report(stripped, tmp_path_factory):
    work = tmp_path_factory.mktemp("estwork")
    code = run(
        "segment", "--books", stripped / "stripped", "--method", "woc",
        "--window", "50", "--alpha", "0.8", "--estimate",
        "--truth", stripped / "truth", "--out", work,
    )
    assert code == 0
    reg = json.loads((work / "regression.json").read_text())
    assert {"algorithm", "mse", "mae", "r2", "baseline"} <= set(reg)
    code = run(
        "evaluate", "--books", stripped / "stripped",
        "--segments", work / "segments", "--truth", stripped / "truth",
        "--out", work, "--algorithm", "WOC est",
    )
    assert code == 0
    table4 = (work / "regression_report.md").read_text()
    assert "| Algorithm | MSE | MAE | R2 | Pk | WD | F1 |" in table4
    assert "Baseline (# sent)" in table4


def test_segment_flag_validation(tmp_path, capsys):
    assert run(
        "segment", "--books", tmp_path, "--method", "woc", "--out", tmp_path
    ) == 2
    assert run(
        "segment", "--books", tmp_path, "--method", "woc", "--out", tmp_path,
        "--breaks", "3", "--estimate",
    ) == 2
    assert run(
        "segment", "--books", tmp_path, "--method", "scores",
        "--out", tmp_path, "--breaks", "3",
    ) == 2


def test_trends_outputs(annotated, small_corpus, tmp_path):
    metadata = tmp_path / "metadata.csv"
    rows = (small_corpus / "metadata.csv").read_text().strip().split("\n")
    rows[1] = rows[1].split(",")[0] + ","  # blank out one birth year
    metadata.write_text("\n".join(rows) + "\n")
    code = run(
        "trends", "--annotations", annotated / "annotations",
        "--metadata", metadata, "--out", tmp_path,
    )
    assert code == 0
    by_year = (tmp_path / "chapters_by_year.csv").read_text().strip().split("\n")
    assert len(by_year) == 5  # header + 4 books (one excluded)
    hist = (tmp_path / "rule_format_histogram.csv").read_text().strip().split("\n")
    total_books = sum(int(r.split(",")[1]) for r in hist[1:])
    assert total_books == 5  # every annotated book contributes once
    assert (tmp_path / "decade_medians.csv").exists()


def test_trends_reproduce_planted_decline(tmp_path):
    # the generator plants ~30 chapters for authors born before 1875 and a
    # steady decline afterwards; decade medians must reproduce that
    corpus_dir = tmp_path / "corpus"
    profile = synth.SynthProfile(trend=True, toc_probability=0.0)
    import statistics

    books = synth.generate_corpus(corpus_dir, n_books=24, seed=33, profile=profile)
    work = tmp_path / "work"
    assert run(
        "annotate", "--books", corpus_dir / "books", "--out", work,
    ) == 0
    assert run(
        "trends", "--annotations", work / "annotations",
        "--metadata", corpus_dir / "metadata.csv", "--out", work,
    ) == 0
    rows = (work / "chapters_by_year.csv").read_text().strip().split("\n")[1:]
    triples = [r.split(",") for r in rows]
    early = [int(c) for _, y, c in triples if int(y) <= 1875]
    late = [int(c) for _, y, c in triples if int(y) >= 1905]
    assert early and late
    assert statistics.median(early) > statistics.median(late)
    # annotation is exact on these books, so counts equal the plant
    plants = {b.book_id: b.manifest["n_chapters"] for b in books}
    for book_id, _, chapters in triples:
        assert int(chapters) == plants[book_id]


def test_structure_command(small_corpus, tmp_path):
    code = run("structure", "--books", small_corpus / "books", "--out", tmp_path)
    assert code == 0
    files = sorted(tmp_path.glob("*.json"))
    assert len(files) == 5
    data = json.loads(files[0].read_text())
    assert {"book_id", "n_sentences", "sentences", "paragraph_breaks"} <= set(data)
    assert len(data["sentences"]) == data["n_sentences"]


def test_export_rules(tmp_path):
    out = tmp_path / "rules.json"
    assert run("export-rules", "--out", out) == 0
    payload = json.loads(out.read_text())
    assert len(payload) == 160


def test_generate_determinism(tmp_path):
    a, b = tmp_path / "a", tmp_path / "b"
    run("generate", "--out", a, "--books", "3", "--seed", "5")
    run("generate", "--out", b, "--books", "3", "--seed", "5")
    for pa in sorted(a.rglob("*")):
        if pa.is_file():
            pb = b / pa.relative_to(a)
            assert pb.read_bytes() == pa.read_bytes(), pa


def test_annotate_determinism(small_corpus, tmp_path):
    out1, out2 = tmp_path / "r1", tmp_path / "r2"
    for out in (out1, out2):
        assert run(
            "annotate", "--books", small_corpus / "books",
            "--truth", small_corpus / "truth", "--out", out,
        ) == 0
    for pa in sorted((out1 / "annotations").glob("*.json")):
        pb = out2 / "annotations" / pa.name
        assert pb.read_bytes() == pa.read_bytes()


def test_annotate_parallel_jobs_match_serial(small_corpus, tmp_path):
    serial, parallel = tmp_path / "s", tmp_path / "p"
    assert run(
        "annotate", "--books", small_corpus / "books", "--out", serial,
    ) == 0
    assert run(
        "annotate", "--books", small_corpus / "books", "--out", parallel,
        "--jobs", "2",
    ) == 0
    for pa in sorted((serial / "annotations").glob("*.json")):
        pb = parallel / "annotations" / pa.name
        assert pb.read_bytes() == pa.read_bytes()


def test_write_atomic_no_temp_left(tmp_path):
    target = tmp_path / "deep" / "file.txt"
    cli.write_atomic(target, "payload")
    assert target.read_text() == "payload"
    leftovers = [p for p in target.parent.iterdir() if p != target]
    assert leftovers == []


def test_empty_book_reports_error(tmp_path, capsys):
    books = tmp_path / "books"
    books.mkdir()
    (books / "empty.txt").write_text("   ")
    code = run("annotate", "--books", books, "--out", tmp_path / "out")
    assert code == 2
    assert "empty" in capsys.readouterr().err
