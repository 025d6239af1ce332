#!/usr/bin/env python3
"""Brute-force oracle for the metric fixtures frozen in the test suite.

Everything here is computed straight from the published definitions, with
no code shared with the Rust implementation:

  * BLEU: explicit n-gram dictionaries, clipped by min(), geometric mean
    via log sum, brevity penalty from the formula.
  * chrF: character n-gram F-scores averaged over the orders that produce
    any n-grams at all.
  * TER: exhaustive search over *all* block-shift sequences (bounded
    depth), not the greedy heuristic — the true minimum for these small
    fixtures.

Prints one JSON object so the acceptance test can diff the values.
"""

import itertools
import json
import math


def ngrams(tokens, n):
    counts = {}
    for i in range(len(tokens) - n + 1):
        g = tuple(tokens[i : i + n])
        counts[g] = counts.get(g, 0) + 1
    return counts


def bleu(hyp_lines, ref_lines, max_n=4):
    """Corpus BLEU on whitespace tokens, no smoothing.

    Returns (score, precisions, brevity_penalty).
    """
    matches = [0] * max_n
    totals = [0] * max_n
    hyp_len = 0
    ref_len = 0
    for hyp, ref in zip(hyp_lines, ref_lines, strict=True):
        h = hyp.split()
        r = ref.split()
        hyp_len += len(h)
        ref_len += len(r)
        for n in range(1, max_n + 1):
            hc = ngrams(h, n)
            rc = ngrams(r, n)
            totals[n - 1] += sum(hc.values())
            matches[n - 1] += sum(min(c, rc.get(g, 0)) for g, c in hc.items())

    precisions = [m / t if t > 0 else 0.0 for m, t in zip(matches, totals)]
    if hyp_len == 0:
        bp = 0.0
    elif hyp_len >= ref_len:
        bp = 1.0
    else:
        bp = math.exp(1.0 - ref_len / hyp_len)
    if any(p == 0.0 for p in precisions):
        return 0.0, precisions, bp
    mean = math.exp(sum(math.log(p) for p in precisions) / max_n)
    return 100.0 * bp * mean, precisions, bp


def chrf(hyp_lines, ref_lines, max_n=6, beta=2.0):
    """Corpus chrF on whitespace-stripped characters."""
    matches = [0] * max_n
    hyp_totals = [0] * max_n
    ref_totals = [0] * max_n
    for hyp, ref in zip(hyp_lines, ref_lines, strict=True):
        h = [c for c in hyp if not c.isspace()]
        r = [c for c in ref if not c.isspace()]
        for n in range(1, max_n + 1):
            hc = ngrams(h, n)
            rc = ngrams(r, n)
            hyp_totals[n - 1] += sum(hc.values())
            ref_totals[n - 1] += sum(rc.values())
            matches[n - 1] += sum(min(c, rc.get(g, 0)) for g, c in hc.items())

    fs = []
    for n in range(max_n):
        if hyp_totals[n] == 0 and ref_totals[n] == 0:
            continue  # order longer than every segment: skip, don't zero
        p = matches[n] / hyp_totals[n] if hyp_totals[n] else 0.0
        r = matches[n] / ref_totals[n] if ref_totals[n] else 0.0
        denom = beta * beta * p + r
        fs.append((1 + beta * beta) * p * r / denom if denom > 0 else 0.0)
    return 100.0 * sum(fs) / len(fs) if fs else 0.0


def levenshtein(a, b):
    prev = list(range(len(b) + 1))
    for i, x in enumerate(a, 1):
        cur = [i]
        for j, y in enumerate(b, 1):
            cur.append(min(prev[j] + 1, cur[j - 1] + 1, prev[j - 1] + (x != y)))
        prev = cur
    return prev[len(b)]


def all_shifts(tokens, max_dist=10):
    """Every (remove a block, reinsert it elsewhere) variant of the list."""
    n = len(tokens)
    for start, length in itertools.product(range(n), range(1, n + 1)):
        if start + length > n:
            continue
        block = tokens[start : start + length]
        rest = tokens[:start] + tokens[start + length :]
        for dest in range(len(rest) + 1):
            if dest == start or abs(dest - start) > max_dist:
                continue
            yield rest[:dest] + block + rest[dest:]


def ter_edits(hyp, ref, max_shifts=3):
    """Minimum shifts + edit distance, by exhaustive search over shift
    sequences up to `max_shifts` deep.  Exponential; fixtures are tiny."""
    best = levenshtein(hyp, ref)
    frontier = {tuple(hyp)}
    seen = set(frontier)
    for depth in range(1, max_shifts + 1):
        nxt = set()
        for state in frontier:
            for shifted in all_shifts(list(state)):
                t = tuple(shifted)
                if t not in seen:
                    seen.add(t)
                    nxt.add(t)
        for state in nxt:
            best = min(best, depth + levenshtein(list(state), ref))
        frontier = nxt
    return best


def ter(hyp_lines, ref_lines):
    edits = 0
    ref_len = 0
    for hyp, ref in zip(hyp_lines, ref_lines, strict=True):
        edits += ter_edits(hyp.split(), ref.split())
        ref_len += len(ref.split())
    return edits / ref_len


def main():
    identity = ["the cat sat on the mat"]

    clip_score, clip_prec, _ = bleu(
        ["the the the the the the the"], ["the cat is on the mat"]
    )
    bp_score, bp_prec, bp = bleu(["a b c d e"], ["a b c d e f g h i j"])
    assert all(p == 1.0 for p in bp_prec), bp_prec
    assert clip_score == 0.0  # no bigram survives clipping

    values = {
        "bleu_identity": bleu(identity, identity)[0],
        "clipped_unigram_p1": clip_prec[0],
        "brevity_penalty": bp,
        "bp_fixture_score": bp_score,
        "chrf_identity": chrf(identity, identity),
        "ter_identity": ter(identity, identity),
        "ter_substitution": ter(["a b c e"], ["a b c d"]),
        "ter_shift": ter(["b a c d"], ["a b c d"]),
    }
    print(json.dumps(values, indent=2))


if __name__ == "__main__":
    main()
