"""Toy recognition systems shared by the CTR tests and the acceptance suite."""
import functools
import itertools
import math

import numpy as np

from lexrec import errorgen, ld, od
from lexrec import hmm as H

from oracles import brute_ctr

POOL = ["he", "gave", "her", "roses", "show", "me", "all", "cars", "a", "have", "e", "to", "go", "an", "at", "ice"]


@functools.lru_cache(maxsize=None)
def lexicon(words):
    alphabet = od.default_alphabet(POOL)
    return od.train_lexicon(list(words), alphabet=alphabet)


def oracle(ld_model, lex, text):
    """Brute-force optimum for a toy system."""
    wcosts = {m.model_id: ld_model.word_costs(m.word) for m in lex}

    def od_cost(model_id, segment):
        return H.viterbi_cost(lex[model_id].hmm, lex.alphabet.encode(segment))[0]

    return brute_ctr(ld_model.trans_cost, wcosts, od_cost, text)


def oracle_fixed(ld_model, lex, text, words):
    """Cheapest reading of ``text`` as exactly the word sequence ``words``."""
    tc = ld_model.trans_cost
    exit_ = tc.shape[0] - 1
    best = math.inf
    for cuts in itertools.combinations(range(1, len(text)), len(words) - 1):
        bounds = (0,) + cuts + (len(text),)
        od_costs = [
            H.viterbi_cost(lex[w].hmm, lex.alphabet.encode(text[a:b]))[0]
            for w, a, b in zip(words, bounds, bounds[1:])
        ]
        for ctx in itertools.product(range(1, exit_), repeat=len(words)):
            c, prev = 0.0, 0
            for w, j, d in zip(words, ctx, od_costs):
                c += tc[prev, j] + ld_model.word_costs(lex[w].word)[j] + d
                prev = j
            best = min(best, c + tc[prev, exit_])
    return best


def random_tagset(rng, words, n_tags, max_amb):
    tags = tuple(f"T{i}" for i in range(n_tags))
    membership = {}
    for w in words:
        k = int(rng.integers(1, max_amb + 1))
        membership[w] = tuple(sorted(rng.choice(tags, size=k, replace=False).tolist()))
    # every tag needs a member word
    for i, t in enumerate(tags):
        if not any(t in v for v in membership.values()):
            w = words[i % len(words)]
            membership[w] = tuple(sorted(set(membership[w]) | {t}))
    return ld.TagSet(tags, membership)


def random_tagged_corpus(rng, tagset, n_sent=6):
    words = tagset.vocabulary
    out = []
    for _ in range(n_sent):
        sent = []
        for _ in range(int(rng.integers(1, 4))):
            w = words[int(rng.integers(len(words)))]
            tags = tagset.membership[w]
            sent.append((w, tags[int(rng.integers(len(tags)))]))
        out.append(sent)
    return out


def random_input(rng, words, max_len=14):
    kb = errorgen.KeyboardLayout.qwerty()
    while True:
        picked = [words[int(rng.integers(len(words)))] for _ in range(int(rng.integers(2, 6)))]
        text = " ".join(picked)
        roll = rng.random()
        if roll < 0.3:
            cands = sorted(errorgen.make_corpus(text, errorgen.OPERATORS, kb).strings())
            text = cands[int(rng.integers(len(cands)))].strip() or text
        elif roll < 0.45:
            text = text.replace(" ", "", 1)
        if 1 <= len(text) <= max_len:
            return text


def scenarios(count=24, seed=2024):
    """``(name, ld_model, lexicon, text, n_best)`` tuples; about half of them
    use tag bigrams with ambiguous words."""
    rng = np.random.default_rng(seed)
    out = []
    for k in range(count):
        size = int(rng.integers(2, 6))
        words = sorted(rng.choice(POOL, size=size, replace=False).tolist())
        lex = lexicon(tuple(words))
        kind = ["baseline", "unigram", "bigram", "bigram"][k % 4]
        n_best = 1
        if kind == "baseline":
            model = ld.build_baseline()
        elif kind == "unigram":
            corpus = [[words[int(rng.integers(size))] for _ in range(3)] for _ in range(3)]
            model = ld.build_unigram(corpus, words)
        else:
            tagset = random_tagset(rng, words, int(rng.integers(2, 4)), 2)
            model = ld.build_bigram_supervised(random_tagged_corpus(rng, tagset), tagset, 0.05, 0.05)
            n_best = tagset.max_ambiguity
        out.append((f"{kind}-{k}", model, lex, random_input(rng, words), n_best))
    return out


def segmentation_system():
    return ld.build_baseline(), lexicon(("all", "cars", "me", "show"))


def run_on_system():
    return ld.build_baseline(), lexicon(("gave", "he", "her", "roses"))


def split_system():
    """Bigram where ``e`` is a rare sentence of its own."""
    tags = ld.TagSet(
        ("PN", "VB", "NN", "LE"),
        {"he": ("PN",), "have": ("VB",), "roses": ("NN",), "e": ("LE",)},
    )
    corpus = [[("he", "PN"), ("have", "VB"), ("roses", "NN")]] * 3 + [[("have", "VB")]] * 2 + [[("e", "LE")]]
    return ld.build_bigram_supervised(corpus, tags), lexicon(("e", "have", "he", "roses"))


def pruning_pathology_system():
    """``go`` is ambiguous between A and B; only B leads on to ``to``.

    From the entry A is cheaper, so a single token per state keeps the A
    reading of ``go`` and pays dearly for ``to`` afterwards.
    """
    a = np.zeros((5, 5))
    a[0, 1], a[0, 2] = 0.6, 0.4
    a[1, 3], a[1, 4] = 0.01, 0.99
    a[2, 3], a[2, 4] = 0.99, 0.01
    a[3, 4] = 1.0
    b = np.zeros((5, 2))
    b[1, 0] = b[2, 0] = b[3, 1] = 1.0
    return ld.LdModel("bigram", a, b, ["go", "to"], ["A", "B", "C"]), lexicon(("go", "to"))
