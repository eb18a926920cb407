import math

import numpy as np
import pytest

from lexrec import hmm as H
from lexrec import ld
from lexrec.errors import InputError, TrainingError

TAGSET = ld.TagSet(
    ("DT", "NN", "VB"),
    {"the": ("DT",), "dog": ("NN",), "cat": ("NN",), "runs": ("VB", "NN"), "sees": ("VB",)},
)
TAGGED = [
    [("the", "DT"), ("dog", "NN"), ("runs", "VB")],
    [("the", "DT"), ("cat", "NN"), ("sees", "VB"), ("the", "DT"), ("dog", "NN")],
    [("runs", "NN")],
]


def test_tagset_file_round_trip(tmp_path):
    p = tmp_path / "tags.txt"
    TAGSET.dump(p)
    again = ld.TagSet.load(p)
    assert again == TAGSET
    assert again.max_ambiguity == 2
    p.write_text("DT\ndog\tXX\n")
    with pytest.raises(InputError):
        ld.TagSet.load(p)


def test_corpus_readers(tmp_path):
    p = tmp_path / "c.txt"
    p.write_text("The/DT dog/NN\n\nruns/VB\n")
    assert ld.read_tagged(p) == [[("the", "DT"), ("dog", "NN")], [("runs", "VB")]]
    assert ld.read_untagged(p) == [["the/dt", "dog/nn"], ["runs/vb"]]
    p.write_text("dog\n")
    with pytest.raises(InputError):
        ld.read_tagged(p)


def test_baseline_adds_nothing():
    m = ld.build_baseline()
    assert m.word_costs("anything").tolist() == [math.inf, 0.0, math.inf]
    assert m.trans_cost[0, 1] == m.trans_cost[1, 1] == m.trans_cost[1, 2] == 0.0


def test_unigram_hand_arithmetic():
    m = ld.build_unigram([["a", "a", "b"]], ["a", "b", "c"], eps_obs=1e-4)
    np.testing.assert_allclose(m.b[1], [2 / 3 * (1 - 1e-4), 1 / 3 * (1 - 1e-4), 1e-4], rtol=1e-14)
    assert m.word_costs("c")[1] == pytest.approx(-math.log(1e-4))
    uniform = ld.build_unigram([["a", "b", "c"]], ["a", "b", "c"])
    np.testing.assert_allclose(uniform.b[1], 1 / 3, rtol=1e-15)
    with pytest.raises(TrainingError):
        ld.build_unigram([[]], ["a"])
    with pytest.raises(InputError):
        ld.build_unigram([["z"]], ["a"])


def test_bigram_supervised_counts():
    eps = 1e-3
    m = ld.build_bigram_supervised(TAGGED, TAGSET, eps_trans=eps, eps_obs=eps)
    dt, nn, vb, ex = 1, 2, 3, 4
    # entry: DT twice, NN once; VB unseen -> eps
    np.testing.assert_allclose(m.a[0, 1:4], [2 / 3 * (1 - eps), 1 / 3 * (1 - eps), eps], rtol=1e-12)
    assert m.a[0, ex] == 0.0
    # DT -> NN three times
    np.testing.assert_allclose(m.a[dt, [dt, nn, vb, ex]], [eps, 1 - 3 * eps, eps, eps], rtol=1e-12)
    # NN: -> VB twice, -> exit twice
    np.testing.assert_allclose(m.a[nn, [dt, nn, vb, ex]], [eps, eps, 0.5 * (1 - 2 * eps), 0.5 * (1 - 2 * eps)], rtol=1e-12)
    # VB: -> exit once, -> DT once
    np.testing.assert_allclose(m.a[vb, [dt, nn, vb, ex]], [0.5 * (1 - 2 * eps), eps, eps, 0.5 * (1 - 2 * eps)], rtol=1e-12)
    col = {w: i for i, w in enumerate(m.vocab)}
    assert m.b[dt, col["the"]] == 1.0
    # NN members: dog (2), cat (1), runs (1)
    np.testing.assert_allclose(m.b[nn, [col["dog"], col["cat"], col["runs"]]], [0.5, 0.25, 0.25], rtol=1e-12)
    # VB members: runs (1), sees (1)
    np.testing.assert_allclose(m.b[vb, [col["runs"], col["sees"]]], [0.5, 0.5], rtol=1e-12)
    assert m.b[vb, col["dog"]] == 0.0
    np.testing.assert_allclose(m.a[:-1].sum(axis=1), 1.0, atol=1e-9)
    np.testing.assert_allclose(m.b[1:-1].sum(axis=1), 1.0, atol=1e-9)


def test_bigram_support_equals_membership():
    m = ld.build_bigram_supervised(TAGGED[:1], TAGSET)
    assert np.array_equal(m.b[1:-1] > 0, TAGSET.mask(m.vocab))


def test_bigram_absent_tag_falls_back_to_uniform(caplog):
    m = ld.build_bigram_supervised([[("the", "DT"), ("dog", "NN")]], TAGSET)
    assert "unseen" in caplog.text
    col = {w: i for i, w in enumerate(m.vocab)}
    assert m.b[3, col["runs"]] == m.b[3, col["sees"]] == 0.5


def test_bigram_rejects_inconsistent_tags():
    with pytest.raises(InputError):
        ld.build_bigram_supervised([[("the", "NN")]], TAGSET)
    with pytest.raises(InputError):
        ld.build_bigram_supervised([[("the", "XX")]], TAGSET)


def test_unsupervised_likelihood_and_support():
    corpus = [[w for w, _ in s] for s in TAGGED] * 2
    hist = []
    m = ld.build_bigram_unsupervised(corpus, TAGSET, iters=15, history=hist)
    assert all(b >= a - 1e-12 for a, b in zip(hist, hist[1:]))
    assert np.array_equal(m.b[1:-1] > 0, TAGSET.mask(m.vocab))
    np.testing.assert_allclose(m.b[1:-1].sum(axis=1), 1.0, atol=1e-9)
    with pytest.raises(InputError):
        ld.build_bigram_unsupervised([["unknown"]], TAGSET)


def test_unsupervised_single_tag_is_unigram():
    tags = ld.TagSet(("X",), {"a": ("X",), "b": ("X",), "c": ("X",)})
    corpus = [["a", "a"], ["b"], ["a", "c", "b"]]
    m = ld.build_bigram_unsupervised(corpus, tags, iters=1)
    np.testing.assert_allclose(m.b[1], [3 / 6, 2 / 6, 1 / 6], rtol=1e-12)


def test_round_trip(tmp_path):
    for m in (
        ld.build_baseline(),
        ld.build_unigram([["a", "b"]], ["a", "b", "c"]),
        ld.build_bigram_supervised(TAGGED, TAGSET),
    ):
        ld.save(m, tmp_path / "m.ld")
        assert ld.load(tmp_path / "m.ld") == m
    with pytest.raises(InputError):
        ld.loads("junk")


def test_bigram_is_an_hmm():
    m = ld.build_bigram_supervised(TAGGED, TAGSET)
    h = m.hmm()
    col = {w: i for i, w in enumerate(m.vocab)}
    assert H.forward(h, [col["the"], col["dog"]]).prob > 0
