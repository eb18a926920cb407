import math

import numpy as np
import pytest

from lexrec import ctr, ld
from lexrec import hmm as H
from lexrec.errors import InputError, NoHypothesisError, ParameterError
from lexrec.tokens import WordLinkRecord, root_record

import scenarios as S

SCENARIOS = S.scenarios()


@pytest.mark.parametrize("case", SCENARIOS, ids=[c[0] for c in SCENARIOS])
def test_matches_brute_force(case):
    _, model, lex, text, n_best = case
    result = ctr.recognize(model, lex, text, ctr.RecognizerConfig(n_best=n_best))
    cost, _ = S.oracle(model, lex, text)
    assert result.total_cost == pytest.approx(cost, abs=1e-9)


@pytest.mark.parametrize("case", SCENARIOS[:8], ids=[c[0] for c in SCENARIOS[:8]])
def test_cost_decomposition(case):
    _, model, lex, text, n_best = case
    r = ctr.recognize(model, lex, text, ctr.RecognizerConfig(n_best=n_best))
    assert list(r.boundaries) == sorted(set(r.boundaries)) and r.boundaries[-1] == len(text)
    total, prev = 0.0, 0
    for word, seg, ctx in zip(r.words, r.segments(text), r.contexts):
        od_cost = H.viterbi_cost(lex[word].hmm, lex.alphabet.encode(seg))[0]
        total += od_cost + model.trans_cost[prev, ctx] + model.word_costs(lex[word].word)[ctx]
        prev = ctx
    total += model.trans_cost[prev, -1]
    assert total == pytest.approx(r.total_cost, abs=1e-9)


def test_segmentation_example():
    model, lex = S.segmentation_system()
    r = ctr.recognize(model, lex, "show me all cars")
    assert r.words == (" show", " me", " all", " cars")
    assert r.boundaries == (4, 7, 11, 16)
    assert r.segments("show me all cars") == ["show", " me", " all", " cars"]
    assert r.text == "show me all cars"


def test_run_on_repair():
    model, lex = S.run_on_system()
    r = ctr.recognize(model, lex, "he gaveher roses")
    assert r.text == "he gave her roses"
    assert r.total_cost == pytest.approx(S.oracle(model, lex, "he gaveher roses")[0], abs=1e-9)


def test_split_repair():
    model, lex = S.split_system()
    r = ctr.recognize(model, lex, "hav e")
    assert r.text == "have"
    cost, trail = S.oracle(model, lex, "hav e")
    assert [w for w, _, _ in trail] == [" have"]
    assert r.total_cost == pytest.approx(cost, abs=1e-9)
    # without a language model the split reading is the cheaper one
    assert ctr.recognize(ld.build_baseline(), lex, "hav e").text == "have e"


def test_nbest_recovers_pruned_optimum():
    model, lex = S.pruning_pathology_system()
    cost, _ = S.oracle(model, lex, "go to")
    one = ctr.recognize(model, lex, "go to", ctr.RecognizerConfig(emit_tags=True))
    two = ctr.recognize(model, lex, "go to", ctr.RecognizerConfig(n_best=2, emit_tags=True))
    assert one.total_cost > cost + 1.0
    assert two.total_cost == pytest.approx(cost, abs=1e-9)
    assert two.tagged_text() == "go/B to/C"
    assert one.tagged_text() == "go/A to/C"


def test_nbest_list_sorted_and_first_is_recognize():
    model, lex = S.pruning_pathology_system()
    alts = ctr.recognize_nbest(model, lex, "go to", 3)
    costs = [a.total_cost for a in alts]
    assert costs == sorted(costs)
    best = ctr.recognize(model, lex, "go to", ctr.RecognizerConfig(n_best=3))
    assert alts[0].words == best.words and alts[0].total_cost == best.total_cost
    single = ctr.recognize_nbest(model, lex, "go to", 1)
    assert len(single) == 1
    assert single[0].total_cost == ctr.recognize(model, lex, "go to").total_cost
    with pytest.raises(ParameterError):
        ctr.recognize_nbest(model, lex, "go to", 0)


def test_nbest_identical_on_unambiguous_system():
    model, lex = S.run_on_system()
    a = ctr.recognize(model, lex, "he gaveher roses")
    b = ctr.recognize(model, lex, "he gaveher roses", ctr.RecognizerConfig(n_best=4))
    assert a.words == b.words and a.total_cost == b.total_cost


def test_single_word_unigram_is_isolated_plus_prior():
    lex = S.lexicon(("show",))
    uni = ld.build_unigram([["show"]], ["show"])
    r = ctr.recognize(uni, lex, "shw")
    od_cost = H.viterbi_cost(lex[" show"].hmm, lex.alphabet.encode("shw"))[0]
    assert r.words == (" show",)
    assert r.total_cost == pytest.approx(od_cost - math.log(uni.b[1, 0]), abs=1e-12)
    assert ctr.recognize_isolated(lex, "shw")[1] == pytest.approx(od_cost, abs=1e-12)


def test_incremental_equals_batch():
    model, lex = S.split_system()
    rec = ctr.Recognizer(model, lex, ctr.RecognizerConfig(n_best=2))
    a, b = rec.session(), rec.session()
    x, y = "he hav e roses", "have"
    for i in range(max(len(x), len(y))):
        a.feed(x[i : i + 1])
        b.feed(y[i : i + 1])
    ra, rb = a.finalize(), b.finalize()
    for r, text in ((ra, x), (rb, y)):
        batch = rec.recognize(text)
        assert (r.words, r.boundaries, r.total_cost) == (batch.words, batch.boundaries, batch.total_cost)


def test_session_errors():
    model, lex = S.segmentation_system()
    rec = ctr.Recognizer(model, lex)
    s = rec.session()
    with pytest.raises(InputError):
        s.finalize()
    s = rec.session().feed("me")
    s.finalize()
    with pytest.raises(InputError):
        s.finalize()
    with pytest.raises(InputError):
        s.feed("x")
    with pytest.raises(InputError):
        rec.recognize("")


def test_backtrack_helper():
    root = root_record()
    first = WordLinkRecord(1.0, root, 3, " a", 1)
    second = WordLinkRecord(2.0, first, 5, " b", 2)
    assert ctr.backtrack(second) == ([" a", " b"], [3, 5], [1, 2])
    assert ctr.backtrack(root) == ([], [], [])
    model, lex = S.segmentation_system()
    r = ctr.recognize(model, lex, "show me")
    assert list(r.words) == [" show", " me"]


def test_beam_prunes_and_reactivates():
    model, lex = S.segmentation_system()
    rec = ctr.Recognizer(model, lex, ctr.RecognizerConfig(beam_width=3.0))
    s = rec.session()
    history = []
    for ch in "show me all cars":
        s.feed(ch)
        history.append({net.model_id: net.active for net in s._nets})
    cars = [h[" cars"] for h in history]
    off = cars.index(False)
    assert any(cars[off:])
    r = s.finalize()
    assert r.text == "show me all cars"
    assert r.total_cost == pytest.approx(ctr.recognize(model, lex, "show me all cars").total_cost, abs=1e-9)


def test_no_hypothesis_and_vocabulary_checks():
    lex = S.lexicon(("go", "to"))
    with pytest.raises(ParameterError):
        ctr.recognize(ld.build_unigram([["go"]], ["go"]), lex, "go")
    model, _ = S.pruning_pathology_system()
    # the context of "to" can never reach the exit
    a = model.a.copy()
    a[3, 4] = 0.0
    a[3, 1] = 1.0
    dead = ld.LdModel("bigram", a, model.b, model.vocab, model.tags)
    with pytest.raises(NoHypothesisError):
        ctr.recognize(dead, S.lexicon(("to",)), "to")
    with pytest.raises(ParameterError):
        ctr.RecognizerConfig(n_best=0)
    with pytest.raises(ParameterError):
        ctr.RecognizerConfig(beam_width=-1.0)
    assert np.isfinite(ctr.recognize(model, lex, "go").total_cost)
