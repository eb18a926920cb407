"""
Correcting connected text
=========================

Word models and a language model decoded together find word boundaries,
fix run-ons and splits, and keep several hypotheses per context when the
best local choice is not the best overall.
"""
import numpy as np

from lexrec import ctr, ld, od

# Segmentation needs no language knowledge at all.
seg = od.train_lexicon(["show", "me", "all", "cars"])
text = "show me all cars"
r = ctr.recognize(ld.build_baseline(), seg, text)
print(f"{text!r} -> {r.segments(text)}  boundaries {r.boundaries}")
print(f"'showmeallcars' -> {ctr.recognize(ld.build_baseline(), seg, 'showmeallcars').text!r}")

# A missing space is repaired by the same search.
lex = od.train_lexicon(["he", "gave", "her", "roses", "have", "e"])
print("run-on:", ctr.recognize(ld.build_baseline(), lex, "he gaveher roses").text)

# A stray space: the baseline happily reads two words, a bigram that has
# rarely seen 'e' prefers the single word.
tags = ld.TagSet(
    ("PN", "VB", "NN", "LE"),
    {"he": ("PN",), "gave": ("VB",), "her": ("PN",), "have": ("VB",), "roses": ("NN",), "e": ("LE",)},
)
corpus = ([[("he", "PN"), ("have", "VB"), ("roses", "NN")]] * 3 + [[("have", "VB")]] * 2 + [[("e", "LE")]]
          + [[("he", "PN"), ("gave", "VB"), ("her", "PN"), ("roses", "NN")]])
bigram = ld.build_bigram_supervised(corpus, tags)
print("split, baseline:", ctr.recognize(ld.build_baseline(), lex, "hav e").text)
print("split, bigram:  ", ctr.recognize(bigram, lex, "hav e").text)

rec = ctr.Recognizer(bigram, lex, ctr.RecognizerConfig(emit_tags=True))
print("tagged:", rec.recognize("he gave her roses").tagged_text())

# Keeping one token per context can lose the optimum.  Here 'go' is
# ambiguous between A and B; A is cheaper to enter but only B leads to 'to'.
a = np.zeros((5, 5))
a[0, 1], a[0, 2] = 0.6, 0.4
a[1, 3], a[1, 4] = 0.01, 0.99
a[2, 3], a[2, 4] = 0.99, 0.01
a[3, 4] = 1.0
b = np.zeros((5, 2))
b[1, 0] = b[2, 0] = b[3, 1] = 1.0
trap = ld.LdModel("bigram", a, b, ["go", "to"], ["A", "B", "C"])
go_to = od.train_lexicon(["go", "to"])
for n in (1, 2):
    best = ctr.recognize(trap, go_to, "go to", ctr.RecognizerConfig(n_best=n, emit_tags=True))
    print(f"n_best={n}: {best.tagged_text()} cost {best.total_cost:.2f}")

# Characters can be fed as they arrive.
session = rec.session()
for ch in "he gaveher roses":
    session = ctr.recognize_incremental(session, ch)
print("incremental:", session.finalize().text)
