#!/usr/bin/env python3
"""Benchmark the compiled kernels against the pure-Python fallback.

Runs the two hot paths (overlap-cut density and DP break placement) on a
generated book and prints a timing table.  Usage:

    python benchmarks/bench_kernels.py [--sentences 3000] [--window 200]
"""

import argparse
import time

import numpy as np

from chapterseg import _kernels_py as pure
from chapterseg import corpus, synth, woc

try:
    from chapterseg import _kernels as compiled
except ImportError:
    compiled = None


def time_call(fn, *args, repeat=3):
    best = float("inf")
    result = None
    for _ in range(repeat):
        t0 = time.perf_counter()
        result = fn(*args)
        best = min(best, time.perf_counter() - t0)
    return best, result


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--sentences", type=int, default=3000)
    ap.add_argument("--window", type=int, default=200)
    ap.add_argument("--candidates", type=int, default=1500)
    ap.add_argument("--breaks", type=int, default=30)
    args = ap.parse_args()

    profile = synth.SynthProfile(
        chapters=(8, 8),
        paragraphs=(30, 40),
        sentences=(3, 5),
        toc_probability=0.0,
        preface_probability=0.0,
    )
    seed = 0
    texts = []
    total = 0
    while total < args.sentences:
        sb = synth.generate_book(f"bench{seed}", seed, profile)
        texts.append("\n\n".join(sb.manifest["bodies"]))
        total += sum(sb.manifest["sentence_counts"])
        seed += 1
    book = corpus.book_from_text("bench", "\n\n".join(texts))
    ids, offsets = woc.encode_book(book)
    gaps = np.asarray(book.paragraph_breaks, dtype=np.int64)
    print(
        f"book: {book.n_sentences} sentences, {len(gaps)} paragraph gaps, "
        f"window {args.window}"
    )

    rows = []
    t_pure, d_pure = time_call(
        pure.density_at_gaps, ids, offsets, gaps, args.window, repeat=1
    )
    rows.append(("density", "python", t_pure))
    if compiled is not None:
        t_c, d_c = time_call(
            compiled.density_at_gaps, ids, offsets, gaps, args.window
        )
        rows.append(("density", "compiled", t_c))
        assert np.allclose(d_pure, d_c, rtol=1e-10)

    rng = np.random.default_rng(1)
    n = book.n_sentences
    c = min(args.candidates, n - 1)
    dp_gaps = np.sort(rng.choice(np.arange(n - 1), size=c, replace=False))
    scores = rng.random(c)
    length = n / (args.breaks + 1)
    t_pure, r_pure = time_call(
        pure.dp_place, dp_gaps, scores, args.breaks, 0.8, length, n, repeat=1
    )
    rows.append(("dp_place", "python", t_pure))
    if compiled is not None:
        t_c, r_c = time_call(
            compiled.dp_place, dp_gaps, scores, args.breaks, 0.8, length, n
        )
        rows.append(("dp_place", "compiled", t_c))
        assert r_pure[0] == r_c[0] and list(r_pure[1]) == list(r_c[1])

    print(f"{'kernel':<10} {'backend':<10} {'seconds':>10}")
    by_kernel = {}
    for kernel, backend, seconds in rows:
        print(f"{kernel:<10} {backend:<10} {seconds:>10.4f}")
        by_kernel.setdefault(kernel, {})[backend] = seconds
    for kernel, timings in by_kernel.items():
        if "compiled" in timings:
            speedup = timings["python"] / timings["compiled"]
            print(f"{kernel}: compiled is {speedup:.1f}x faster")
    if compiled is None:
        print("compiled kernels unavailable; showing fallback only")


if __name__ == "__main__":
    main()
