"""
Generating keyboard errors
==========================

Training corpora for the word models come from systematically corrupting
each word.  Insertions and substitutions only use keys next to the
intended one on the keyboard.
"""
from lexrec import errorgen as E

kb = E.KeyboardLayout.qwerty()
print("neighbours of 'o':", kb.neighbours["o"])

word = " show"  # words carry a leading space
for name, fn in [
    ("deletions", E.gen_deletions),
    ("transpositions", E.gen_transpositions),
    ("space insertions", E.gen_space_insertions),
    ("double strokes", E.gen_double_strokes),
]:
    print(f"{name:>17}: {sorted(fn(word))}")
print(f"{'insertions':>17}: {len(E.gen_insertions(word, kb))} strings")
print(f"{'substitutions':>17}: {sorted(E.gen_substitutions(word, kb))[:6]} ...")

# With every letter allowed, a word of n distinct letters has 57n + 27
# single-error variants over a 28-symbol alphabet.
for n in (1, 4, 8):
    w = "abcdefgh"[:n]
    print(f"n={n}: {E.raw_single_error_count(w)} candidates, formula {57 * n + 27}")

# A training corpus keeps one entry per distinct corruption.
corpus = E.make_corpus(word, E.TRAINING_DEFAULT, kb)
print(f"{len(corpus.corruptions)} training strings for {word!r}; first few:")
for s, tag in corpus.corruptions[:5]:
    print(f"  {s!r:12} {tag}")

# Corruptions that happen to be real words can be filtered out.
filtered = E.filter_real_words(E.make_corpus(" he", E.OPERATORS, kb), [" he", " her", " e"])
print("real words removed from ' he':", sorted({s for s, _ in E.make_corpus(" he", E.OPERATORS, kb).corruptions}
                                              - {s for s, _ in filtered.corruptions}))
