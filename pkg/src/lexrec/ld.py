"""Linguistic decoder: language models whose observables are words.

Three kinds are supported.  The baseline adds nothing to any path.  The
unigram has a single context that loops on itself at no cost.  The tag
bigram is a proper HMM with one emitting state per tag, trained either from
a tagged corpus or with Baum-Welch on untagged text.

Every model is stored as full probability matrices ``a`` (``N x N``, entry
state 0 and exit state ``N-1``) and ``b`` (``N x V``); costs are derived as
``-ln``.
"""
from __future__ import annotations

import io
import json
import logging
from dataclasses import dataclass, field
from typing import Iterable, Sequence

import numpy as np

from . import hmm as H
from .errors import InputError, ParameterError, TrainingError

log = logging.getLogger(__name__)

KINDS = ("baseline", "unigram", "bigram")
FORMAT_TAG = "lexrec-ld"


@dataclass
class TagSet:
    """Tag names plus the tags each vocabulary word can carry."""

    tags: tuple[str, ...]
    membership: dict[str, tuple[str, ...]] = field(default_factory=dict)

    def __post_init__(self):
        self.tags = tuple(self.tags)
        if len(set(self.tags)) != len(self.tags):
            raise InputError("duplicate tag names")
        known = set(self.tags)
        for word, tags in self.membership.items():
            if not tags:
                raise InputError(f"word {word!r} has no tag")
            unknown = set(tags) - known
            if unknown:
                raise InputError(f"word {word!r} uses unknown tags {sorted(unknown)}")
        self.membership = {w: tuple(t) for w, t in self.membership.items()}

    @property
    def vocabulary(self) -> list[str]:
        return sorted(self.membership)

    @property
    def max_ambiguity(self) -> int:
        return max((len(t) for t in self.membership.values()), default=0)

    def mask(self, vocab: Sequence[str]) -> np.ndarray:
        """``|tags| x |vocab|`` membership mask."""
        pos = {t: i for i, t in enumerate(self.tags)}
        m = np.zeros((len(self.tags), len(vocab)), dtype=bool)
        for k, w in enumerate(vocab):
            for t in self.membership.get(w, ()):
                m[pos[t], k] = True
        return m

    @classmethod
    def load(cls, path) -> "TagSet":
        """``TAG`` lines declare tags, ``word<TAB>TAG[,TAG...]`` lines membership."""
        tags, membership = [], {}
        for lineno, line in _lines(path):
            if "\t" in line:
                word, _, field = line.partition("\t")
                names = tuple(t.strip() for t in field.split(",") if t.strip())
                word = word.strip().lower()
                if not word or not names:
                    raise InputError(f"{path}:{lineno}: malformed membership line")
                merged = membership.get(word, ()) + tuple(n for n in names if n not in membership.get(word, ()))
                membership[word] = merged
            else:
                if len(line.split()) != 1:
                    raise InputError(f"{path}:{lineno}: a tag name is a single token")
                if line not in tags:
                    tags.append(line)
        return cls(tuple(tags), membership)

    def dump(self, path) -> None:
        with open(path, "w", encoding="utf-8", newline="\n") as fh:
            for t in self.tags:
                fh.write(t + "\n")
            for w in self.vocabulary:
                fh.write(f"{w}\t{','.join(self.membership[w])}\n")


def _lines(path):
    try:
        fh = open(path, encoding="utf-8")
    except OSError as exc:
        raise InputError(f"cannot read {path}: {exc}") from None
    with fh:
        for lineno, raw in enumerate(fh, 1):
            line = raw.rstrip("\n").strip(" \r")
            if line:
                yield lineno, line


def read_tagged(path) -> list[list[tuple[str, str]]]:
    """One sentence per line, tokens written ``word/TAG``."""
    out = []
    for lineno, line in _lines(path):
        sent = []
        for tok in line.split():
            word, sep, tag = tok.rpartition("/")
            if not sep or not word or not tag:
                raise InputError(f"{path}:{lineno}: token {tok!r} is not word/TAG")
            sent.append((word.lower(), tag))
        out.append(sent)
    return out


def read_untagged(path) -> list[list[str]]:
    return [[w.lower() for w in line.split()] for _, line in _lines(path)]


class LdModel:
    """Language model with ``N`` states over a word vocabulary.

    The baseline has no vocabulary: every word is observable from its single
    context at zero cost.
    """

    def __init__(self, kind: str, a, b, vocab: Sequence[str] | None, tags: Sequence[str] | None = None):
        if kind not in KINDS:
            raise ParameterError(f"unknown language model kind {kind!r}")
        self.kind = kind
        self.a = np.asarray(a, dtype=float)
        self.b = np.asarray(b, dtype=float)
        n = self.a.shape[0]
        if self.a.shape != (n, n) or n < 3 or self.b.shape[0] != n:
            raise ParameterError("inconsistent language model matrices")
        self.vocab = None if vocab is None else tuple(vocab)
        if self.vocab is not None and self.b.shape[1] != len(self.vocab):
            raise ParameterError("observation matrix does not match the vocabulary")
        self.tags = None if tags is None else tuple(tags)
        self._word_index = None if self.vocab is None else {w: i for i, w in enumerate(self.vocab)}
        self.trans_cost = H.neg_log(self.a)
        self.obs_cost = H.neg_log(self.b)

    @property
    def num_states(self) -> int:
        return self.a.shape[0]

    @property
    def contexts(self) -> list[str]:
        """Label of every emitting state."""
        if self.tags is not None:
            return list(self.tags)
        return [self.kind] * (self.num_states - 2)

    def word_costs(self, word: str) -> np.ndarray:
        """``-ln b_j(word)`` for every state ``j`` (``inf`` where unobservable)."""
        if self.vocab is None:
            costs = np.full(self.num_states, np.inf)
            costs[1:-1] = 0.0
            return costs
        k = self._word_index.get(word)
        if k is None:
            return np.full(self.num_states, np.inf)
        return self.obs_cost[:, k].copy()

    def covers(self, words: Iterable[str]) -> list[str]:
        """Words that cannot be hypothesised by this model."""
        if self.vocab is None:
            return []
        return [w for w in words if w not in self._word_index]

    def hmm(self) -> H.Hmm:
        """The bigram as an :class:`Hmm` (only bigrams are proper HMMs)."""
        if self.kind != "bigram":
            raise ParameterError(f"a {self.kind} model is not a stochastic HMM")
        return H.Hmm(self.a[:-1, 1:], self.b[1:-1], self.vocab)

    def __eq__(self, other):
        if not isinstance(other, LdModel):
            return NotImplemented
        return (
            self.kind == other.kind
            and self.vocab == other.vocab
            and self.tags == other.tags
            and np.array_equal(self.a, other.a)
            and np.array_equal(self.b, other.b)
        )

    def __repr__(self):
        return f"LdModel({self.kind}, states={self.num_states}, vocab={None if self.vocab is None else len(self.vocab)})"


def _loop_matrix(n_states: int) -> np.ndarray:
    # zero-cost entry -> context, context -> context, context -> exit
    a = np.zeros((n_states, n_states))
    a[0, 1:-1] = 1.0
    a[1:-1, 1:] = 1.0
    return a


def build_baseline() -> LdModel:
    """No language model: tokens circulate without any added cost."""
    return LdModel("baseline", _loop_matrix(3), np.zeros((3, 0)), None)


def build_unigram(corpus: Iterable[Iterable[str]], vocab: Sequence[str], eps_obs: float = 1e-4) -> LdModel:
    """Relative word frequencies smoothed over unseen vocabulary words."""
    vocab = list(vocab)
    index = {w: i for i, w in enumerate(vocab)}
    counts = np.zeros(len(vocab))
    for sent in corpus:
        for w in sent:
            if w not in index:
                raise InputError(f"corpus word {w!r} is not in the vocabulary")
            counts[index[w]] += 1
    if counts.sum() == 0:
        raise TrainingError("the unigram corpus holds no tokens")
    row = H.smooth_additive(counts / counts.sum(), eps_obs)
    b = np.zeros((3, len(vocab)))
    b[1] = row
    return LdModel("unigram", _loop_matrix(3), b, vocab)


def _bigram_masks(tagset: TagSet, vocab):
    s = len(tagset.tags)
    n = s + 2
    trans_mask = np.zeros((n, n), dtype=bool)
    trans_mask[0, 1:-1] = True
    trans_mask[1:-1, 1:] = True
    obs_mask = np.zeros((n, len(vocab)), dtype=bool)
    obs_mask[1:-1] = tagset.mask(vocab)
    empty = [t for t, row in zip(tagset.tags, obs_mask[1:-1]) if not row.any()]
    if empty:
        raise ParameterError(f"tags {empty} have no member words")
    return trans_mask, obs_mask


def _normalise(counts, mask, what, labels):
    out = np.zeros_like(counts)
    for i in range(counts.shape[0]):
        if not mask[i].any():
            continue
        total = counts[i].sum()
        if total > 0:
            out[i] = counts[i] / total
        else:
            log.warning("%s row %s unseen in corpus; using a uniform row", what, labels[i])
            out[i] = mask[i] / mask[i].sum()
    return out


def _smooth_rows(p, mask, eps):
    out = p.copy()
    for i in range(p.shape[0]):
        if mask[i].any():
            out[i] = H.smooth_additive(p[i], eps, mask[i])
    return out


def build_bigram_supervised(
    corpus: Iterable[Sequence[tuple[str, str]]],
    tagset: TagSet,
    eps_trans: float = 1e-3,
    eps_obs: float = 1e-3,
) -> LdModel:
    """Tag bigram estimated from counts in a tagged corpus.

    The entry row counts sentence-initial tags and the exit column
    sentence-final tags.  Observation smoothing only reaches the member words
    of each tag.
    """
    vocab = tagset.vocabulary
    windex = {w: i for i, w in enumerate(vocab)}
    tindex = {t: i + 1 for i, t in enumerate(tagset.tags)}
    n = len(tagset.tags) + 2
    trans = np.zeros((n, n))
    emit = np.zeros((n, len(vocab)))
    for sent in corpus:
        if not sent:
            continue
        prev = 0
        for word, tag in sent:
            if tag not in tindex:
                raise InputError(f"unknown tag {tag!r}")
            if word not in windex or tag not in tagset.membership[word]:
                raise InputError(f"{word}/{tag} is not allowed by the tag set")
            j = tindex[tag]
            trans[prev, j] += 1
            emit[j, windex[word]] += 1
            prev = j
        trans[prev, n - 1] += 1
    if trans.sum() == 0:
        raise TrainingError("the tagged corpus holds no sentences")
    trans_mask, obs_mask = _bigram_masks(tagset, vocab)
    labels = ["<entry>", *tagset.tags, "<exit>"]
    a = _smooth_rows(_normalise(trans, trans_mask, "transition", labels), trans_mask, eps_trans)
    b = _smooth_rows(_normalise(emit, obs_mask, "observation", labels), obs_mask, eps_obs)
    return LdModel("bigram", a, b, vocab, tagset.tags)


def build_bigram_unsupervised(
    corpus: Iterable[Sequence[str]],
    tagset: TagSet,
    iters: int = 20,
    eps_trans: float = 1e-3,
    eps_obs: float = 1e-3,
    history: list | None = None,
) -> LdModel:
    """Tag bigram trained with Baum-Welch on untagged sentences.

    Training starts from uniform transitions and observation rows uniform
    over each tag's member words; membership zeros stay zero throughout.
    """
    vocab = tagset.vocabulary
    windex = {w: i for i, w in enumerate(vocab)}
    seqs = []
    for sent in corpus:
        if not sent:
            continue
        for w in sent:
            if w not in windex:
                raise InputError(f"corpus word {w!r} has no tag membership")
        seqs.append(np.array([windex[w] for w in sent], dtype=np.intp))
    if not seqs:
        raise TrainingError("the corpus holds no sentences")
    trans_mask, obs_mask = _bigram_masks(tagset, vocab)
    a0 = trans_mask / trans_mask.sum(axis=1, keepdims=True).clip(min=1)
    b0 = obs_mask / obs_mask.sum(axis=1, keepdims=True).clip(min=1)
    model = H.Hmm(a0[:-1, 1:], b0[1:-1], vocab)
    model = H.baum_welch_multi(model, seqs, max_iters=iters, conv_eps=0.0, history=history)
    a = _smooth_rows(model.a, trans_mask, eps_trans)
    b = _smooth_rows(model.b, obs_mask, eps_obs)
    return LdModel("bigram", a, b, vocab, tagset.tags)


# ---------------------------------------------------------------------------
# serialisation


def dumps(model: LdModel) -> str:
    out = io.StringIO()
    out.write(f"{FORMAT_TAG} 1\n")
    out.write(f"kind {model.kind}\n")
    out.write(f"vocab {json.dumps(model.vocab, ensure_ascii=False)}\n")
    out.write(f"tags {json.dumps(model.tags, ensure_ascii=False)}\n")
    out.write(f"states {model.num_states}\n")
    out.write("a\n")
    for row in model.a:
        out.write(" ".join(repr(float(x)) for x in row) + "\n")
    out.write("b\n")
    for row in model.b:
        out.write(" ".join(repr(float(x)) for x in row) + "\n")
    return out.getvalue()


def loads(text: str) -> LdModel:
    lines = iter(text.splitlines())
    try:
        if next(lines) != f"{FORMAT_TAG} 1":
            raise InputError(f"not a {FORMAT_TAG} file")
        kind = _field(next(lines), "kind")
        vocab = json.loads(_field(next(lines), "vocab"))
        tags = json.loads(_field(next(lines), "tags"))
        n = int(_field(next(lines), "states"))
        if next(lines) != "a":
            raise InputError("missing transition section")
        a = [[float(x) for x in next(lines).split()] for _ in range(n)]
        if next(lines) != "b":
            raise InputError("missing observation section")
        width = 0 if vocab is None else len(vocab)
        b = [[float(x) for x in next(lines).split()] for _ in range(n)]
    except StopIteration:
        raise InputError("truncated language model file") from None
    except (ValueError, json.JSONDecodeError) as exc:
        raise InputError(f"malformed language model file: {exc}") from None
    return LdModel(kind, a, np.array(b, dtype=float).reshape(n, width), vocab, tags)


def _field(line: str, name: str) -> str:
    key, _, value = line.partition(" ")
    if key != name:
        raise InputError(f"expected field {name!r}, got {line!r}")
    return value


def save(model: LdModel, path) -> None:
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(dumps(model))


def load(path) -> LdModel:
    try:
        with open(path, encoding="utf-8") as fh:
            text = fh.read()
    except OSError as exc:
        raise InputError(f"cannot read language model {path}: {exc}") from None
    return loads(text)
