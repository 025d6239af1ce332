#!/usr/bin/env python3
"""Regenerate the smoke-test fixture under crates/cli/fixtures/smoke/.

A tiny synthetic language pair with a bijective vocabulary: source word
s<i> always means target word t<i>.  Every corpus is drawn from the same
distribution, so a lexical model trained on the parallel part translates
the held-out set perfectly and the whole experiment is cheap and stable.

The fixture files are committed; this script only exists so they can be
rebuilt or resized.  Run from the repository root:

    python3 scripts/make_smoke.py
"""

import pathlib
import random

VOCAB = 30
TRAIN = 150
MONO = 80
TEST_DOCS = [("doc-a", "xx", 10), ("doc-b", "yy", 10), ("doc-c", "zz", 10)]

OUT = pathlib.Path(__file__).resolve().parent.parent / "crates/cli/fixtures/smoke"

rng = random.Random(7)


def sentence():
    # 4..8 words so 4-gram BLEU is meaningful on every segment
    return [rng.randrange(VOCAB) for _ in range(rng.randint(4, 8))]


def src(ids):
    return " ".join(f"s{i:02d}" for i in ids)


def tgt(ids):
    return " ".join(f"t{i:02d}" for i in ids)


def write(name, lines):
    (OUT / name).write_text("".join(line + "\n" for line in lines))


def main():
    OUT.mkdir(parents=True, exist_ok=True)

    train = [sentence() for _ in range(TRAIN)]
    covered = {i for s in train for i in s}
    assert covered == set(range(VOCAB)), f"vocab gap: {sorted(set(range(VOCAB)) - covered)}"
    write("train.xx.txt", [src(s) for s in train])
    write("train.yy.txt", [tgt(s) for s in train])

    write("mono.xx.txt", [src(sentence()) for _ in range(MONO)])
    write("mono.yy.txt", [tgt(sentence()) for _ in range(MONO)])

    test = [sentence() for _ in range(sum(n for _, _, n in TEST_DOCS))]
    write("test.src.xx.txt", [src(s) for s in test])

    sgml = ['<refset setid="smoke" srclang="xx" trglang="yy">']
    cursor = 0
    for doc_id, origlang, count in TEST_DOCS:
        sgml.append(f'<doc docid="{doc_id}" origlang="{origlang}">')
        for offset in range(count):
            sgml.append(f'<seg id="{offset + 1}">{tgt(test[cursor])}</seg>')
            cursor += 1
        sgml.append("</doc>")
    sgml.append("</refset>")
    write("test.ref.sgm", sgml)

    print(f"wrote fixture to {OUT}")


if __name__ == "__main__":
    main()
