"""
Language models over words
==========================

Three language models decide which word sequences are plausible: a
baseline that allows anything, a unigram and a bigram over part-of-speech
tags where ambiguous words belong to several tags.
"""
import numpy as np

from lexrec import ld

corpus = [
    [("he", "PN"), ("gave", "VB"), ("her", "PN"), ("roses", "NN")],
    [("she", "PN"), ("gave", "VB"), ("her", "PN"), ("roses", "NN")],
    [("her", "DT"), ("roses", "NN"), ("bloom", "VB")],
]
tags = ld.TagSet(
    ("PN", "VB", "NN", "DT"),
    {"he": ("PN",), "she": ("PN",), "her": ("PN", "DT"), "gave": ("VB",), "bloom": ("VB",), "roses": ("NN",)},
)

base = ld.build_baseline()
print("baseline costs for 'roses':", base.word_costs("roses"))

words_only = [[w for w, _ in s] for s in corpus]
uni = ld.build_unigram(words_only, tags.vocabulary)
print("unigram P(w):", {w: round(float(p), 3) for w, p in zip(uni.vocab, uni.b[1])})

bi = ld.build_bigram_supervised(corpus, tags)
np.set_printoptions(precision=3, suppress=True)
print("bigram contexts:", bi.contexts)
print("tag transitions (entry row first, exit column last):")
print(bi.a)
print("cost of 'her' per context:", np.round(bi.word_costs("her"), 2) + 0.0)

# Without tags the same model can be estimated with Baum-Welch.
history = []
unsup = ld.build_bigram_unsupervised(words_only, tags, iters=10, history=history)
print("unsupervised log-likelihoods:", " ".join(f"{x:.2f}" for x in history))
