"""Orthographic decoder: one left-to-right character HMM per vocabulary word.

A word model has an emitting state per character, optionally preceded by a
state for the word's leading space.  Transitions go forward by at most
``delta`` states and every emitting state loops on itself, so insertions,
deletions and substitutions all have finite cost once the observation rows
are smoothed.
"""
from __future__ import annotations

import json
from dataclasses import dataclass
from pathlib import Path
from typing import Iterable, Sequence

import numpy as np

from . import errorgen
from . import hmm as H
from .errors import InputError, NoHypothesisError, ParameterError
from .tokens import INF, TokenNetwork, beam_prune, global_best, step_model

SPACE = " "
UNK = "<unk>"
SPECIAL_SUFFIX = "#special:space-only"
MANIFEST = "lexicon.json"

SELF_LOOP = 0.1
ADVANCE = 0.8
SKIP = 0.1
OWN_CHAR = 0.9
EPS_OBS = 1e-4
DELTA = 2


class CharacterAlphabet:
    """Ordered character symbols; always contains the space and an UNK symbol.

    Input is lowercased before lookup and characters outside the alphabet
    map to UNK.
    """

    def __init__(self, chars: Iterable[str]):
        chars = {c.lower() for c in chars} | {SPACE}
        for c in chars:
            if len(c) != 1:
                raise InputError(f"alphabet entries must be single characters, got {c!r}")
        self.symbols = tuple(sorted(chars)) + (UNK,)
        self._index = {c: i for i, c in enumerate(self.symbols[:-1])}

    @property
    def size(self) -> int:
        return len(self.symbols)

    @property
    def unk(self) -> int:
        return self.size - 1

    def __contains__(self, ch: str) -> bool:
        return ch.lower() in self._index

    def index(self, ch: str) -> int:
        return self._index.get(ch.lower(), self.unk)

    def encode(self, text: str, strict: bool = False) -> np.ndarray:
        """Symbol ids for ``text``; ``strict`` rejects characters outside the alphabet."""
        if strict:
            bad = sorted({c for c in text if c not in self})
            if bad:
                raise InputError(f"characters {bad} are not in the alphabet")
        return np.array([self.index(c) for c in text], dtype=np.intp)

    @classmethod
    def from_symbols(cls, symbols: Sequence[str]) -> "CharacterAlphabet":
        if not symbols or symbols[-1] != UNK:
            raise InputError("symbol table must end with the UNK symbol")
        alpha = cls(symbols[:-1])
        if alpha.symbols != tuple(symbols):
            raise InputError("symbol table is not in canonical order")
        return alpha

    def __eq__(self, other):
        return isinstance(other, CharacterAlphabet) and self.symbols == other.symbols

    def __repr__(self):
        return f"CharacterAlphabet({''.join(self.symbols[:-1])!r})"


@dataclass(frozen=True)
class WordModel:
    """A word model.  ``model_id`` carries the leading space in CTR mode."""

    model_id: str
    hmm: H.Hmm
    delta: int = DELTA
    special: bool = False

    @property
    def word(self) -> str:
        return self.model_id[1:] if self.has_space_state else self.model_id

    @property
    def has_space_state(self) -> bool:
        return len(self.model_id) > 1 and self.model_id.startswith(SPACE)


def topology(length: int, delta: int = DELTA) -> np.ndarray:
    """Boolean ``N x N`` arc mask of a left-to-right model with ``length``
    emitting states."""
    if length < 1:
        raise ParameterError("a word model needs at least one emitting state")
    if delta < 1:
        raise ParameterError("delta must be at least 1")
    n = length + 2
    mask = np.zeros((n, n), dtype=bool)
    for i in range(n - 1):
        for j in range(max(i, 1), min(i + delta, n - 1) + 1):
            mask[i, j] = True
    mask[0, n - 1] = False  # the entry never jumps straight to the exit
    return mask


def initial_transitions(length: int, delta: int = DELTA) -> np.ndarray:
    mask = topology(length, delta)
    n = mask.shape[0]
    a = np.zeros((n, n))
    for i in range(n - 1):
        skips = [j for j in np.flatnonzero(mask[i]) if j > i + 1]
        if i > 0:
            a[i, i] = SELF_LOOP
        if mask[i, i + 1]:
            a[i, i + 1] = ADVANCE
        for j in skips:
            a[i, j] = SKIP / len(skips)
        a[i] /= a[i].sum()
    return a


def build_word_model(
    word: str,
    alphabet: CharacterAlphabet,
    with_space_state: bool = True,
    delta: int = DELTA,
    special: bool = False,
) -> WordModel:
    """Untrained word model biased towards spelling ``word`` exactly."""
    word = word.lower()
    if not word or word.startswith(SPACE):
        raise InputError(f"invalid word {word!r}")
    bad = sorted({c for c in word if c not in alphabet})
    if bad:
        raise InputError(f"characters {bad} of {word!r} are not in the alphabet")
    model_id = SPACE + word if with_space_state else word
    a = initial_transitions(len(model_id), delta)
    k = alphabet.size
    b = np.full((len(model_id), k), (1.0 - OWN_CHAR) / (k - 1))
    for j, ch in enumerate(model_id):
        b[j, alphabet.index(ch)] = OWN_CHAR
    hmm = H.Hmm(a[:-1, 1:], b, alphabet.symbols)
    return WordModel(model_id, hmm, delta, special)


def train_word_model(
    model: WordModel,
    corpus: Iterable[str],
    alphabet: CharacterAlphabet,
    eps_obs: float = EPS_OBS,
    max_iters: int = 100,
    conv_eps: float = 1e-6,
) -> WordModel:
    """Baum-Welch on ``corpus`` followed by additive smoothing of the
    observation rows.  Transition zeros are left untouched.

    Reestimated observation probabilities below ``eps_obs`` count as unseen,
    so every observation entry ends up at least ``eps_obs``.
    """
    seqs = [alphabet.encode(s.lower(), strict=True) for s in corpus if s]
    if not seqs:
        raise InputError(f"empty training corpus for {model.model_id!r}")
    trained = H.baum_welch_multi(model.hmm, seqs, max_iters=max_iters, conv_eps=conv_eps)
    obs = trained.observations.copy()
    obs[obs < eps_obs] = 0.0
    obs /= obs.sum(axis=1, keepdims=True)
    trained = H.smooth_observations(trained.replace(observations=obs), eps_obs)
    return WordModel(model.model_id, trained, model.delta, model.special)


def training_corpus(
    model_id: str,
    special: bool = False,
    operators: Iterable[str] = errorgen.TRAINING_DEFAULT,
    kb: errorgen.KeyboardLayout | None = None,
    vocabulary: Iterable[str] | None = None,
) -> list[str]:
    """The word followed by its generated corruptions.

    Special words only get space corruptions.  With ``vocabulary`` real-word
    corruptions are filtered out.
    """
    if special:
        corpus = errorgen.space_only_corpus(model_id)
    else:
        corpus = errorgen.make_corpus(model_id, operators, kb)
    if vocabulary is not None:
        corpus = errorgen.filter_real_words(corpus, vocabulary)
    return corpus.training_strings()


class Lexicon:
    """Word models sharing one character alphabet."""

    def __init__(self, models: Sequence[WordModel], alphabet: CharacterAlphabet):
        ids = [m.model_id for m in models]
        if len(set(ids)) != len(ids):
            raise ParameterError("word model ids must be unique")
        for m in models:
            if m.hmm.symbols != alphabet.symbols:
                raise ParameterError(f"model {m.model_id!r} uses a different alphabet")
        self.models = list(models)
        self.alphabet = alphabet
        self.index = {mid: i for i, mid in enumerate(ids)}

    def __len__(self):
        return len(self.models)

    def __iter__(self):
        return iter(self.models)

    def __getitem__(self, model_id: str) -> WordModel:
        return self.models[self.index[model_id]]

    @property
    def ids(self) -> list[str]:
        return [m.model_id for m in self.models]

    @property
    def words(self) -> list[str]:
        return [m.word for m in self.models]

    @property
    def special(self) -> set[str]:
        return {m.model_id for m in self.models if m.special}

    def save(self, directory) -> None:
        """Write one model file per word plus a JSON manifest."""
        directory = Path(directory)
        directory.mkdir(parents=True, exist_ok=True)
        entries = []
        for i, m in enumerate(self.models):
            fname = f"m{i:04d}.hmm"
            H.save(m.hmm, directory / fname)
            entries.append({"id": m.model_id, "file": fname, "delta": m.delta, "special": m.special})
        manifest = {
            "format": "lexrec-lexicon",
            "version": 1,
            "alphabet": list(self.alphabet.symbols),
            "models": entries,
        }
        with open(directory / MANIFEST, "w", encoding="utf-8", newline="\n") as fh:
            json.dump(manifest, fh, indent=1, ensure_ascii=False, sort_keys=True)
            fh.write("\n")

    @classmethod
    def load(cls, directory) -> "Lexicon":
        directory = Path(directory)
        try:
            with open(directory / MANIFEST, encoding="utf-8") as fh:
                manifest = json.load(fh)
        except (OSError, json.JSONDecodeError) as exc:
            raise InputError(f"cannot read lexicon manifest in {directory}: {exc}") from None
        if manifest.get("format") != "lexrec-lexicon" or manifest.get("version") != 1:
            raise InputError(f"{directory} is not a lexrec lexicon")
        alphabet = CharacterAlphabet.from_symbols(manifest["alphabet"])
        models = []
        for e in manifest["models"]:
            hmm = H.load(directory / e["file"])
            models.append(WordModel(e["id"], hmm, e["delta"], e["special"]))
        return cls(models, alphabet)


def read_word_list(path) -> list[tuple[str, bool]]:
    """Lexicon file: one word per line, ``#special:space-only`` marks
    punctuation and number words."""
    out = []
    seen = set()
    try:
        fh = open(path, encoding="utf-8")
    except OSError as exc:
        raise InputError(f"cannot read lexicon {path}: {exc}") from None
    with fh:
        for lineno, raw in enumerate(fh, 1):
            line = raw.strip()
            if not line:
                continue
            special = line.endswith(SPECIAL_SUFFIX)
            if special:
                line = line[: -len(SPECIAL_SUFFIX)].strip()
            elif "#" in line[1:]:
                raise InputError(f"{path}:{lineno}: unknown annotation in {raw.strip()!r}")
            if line.startswith("<") and line.endswith(">"):
                raise InputError(f"{path}:{lineno}: word groups such as {line} are not supported")
            if len(line.split()) != 1:
                raise InputError(f"{path}:{lineno}: expected a single word")
            word = line.lower()
            if word in seen:
                continue
            seen.add(word)
            out.append((word, special))
    return out


def default_alphabet(words: Iterable[str], kb: errorgen.KeyboardLayout | None = None) -> CharacterAlphabet:
    """Characters of ``words`` together with their keyboard neighbours."""
    kb = kb or errorgen.KeyboardLayout.qwerty()
    chars = set()
    for w in words:
        for c in w.lower():
            chars.add(c)
            chars.update(kb[c])
    return CharacterAlphabet(chars)


def train_lexicon(
    words: Iterable[str | tuple[str, bool]],
    alphabet: CharacterAlphabet | None = None,
    operators: Iterable[str] = errorgen.TRAINING_DEFAULT,
    kb: errorgen.KeyboardLayout | None = None,
    filter_real: bool = False,
    eps_obs: float = EPS_OBS,
    delta: int = DELTA,
    with_space_state: bool = True,
    max_iters: int = 100,
    conv_eps: float = 1e-6,
) -> Lexicon:
    """Build and train a model for every word.

    ``words`` holds plain words or ``(word, special)`` pairs.
    """
    entries = [(w, False) if isinstance(w, str) else (w[0], bool(w[1])) for w in words]
    kb = kb or errorgen.KeyboardLayout.qwerty()
    operators = tuple(operators)
    if alphabet is None:
        alphabet = default_alphabet((w for w, _ in entries), kb)
    prefix = SPACE if with_space_state else ""
    vocabulary = [prefix + w.lower() for w, _ in entries] if filter_real else None
    models = []
    for word, special in entries:
        m = build_word_model(word, alphabet, with_space_state, delta, special)
        corpus = training_corpus(m.model_id, special, operators, kb, vocabulary)
        corpus = [s for s in corpus if all(c in alphabet for c in s)]
        models.append(train_word_model(m, corpus, alphabet, eps_obs, max_iters, conv_eps))
    return Lexicon(models, alphabet)


def alignment_cost(model: WordModel, text: str, alphabet: CharacterAlphabet) -> float:
    """``-ln`` of the best alignment of ``text`` with the word model."""
    return H.viterbi_cost(model.hmm, alphabet.encode(text))[0]


def best_word_isolated(lexicon: Lexicon, text: str, beam: float = INF) -> tuple[str, float]:
    """Isolated word recognition with beam search.

    Every model starts with a zero-cost token; before each step, models whose
    best token is worse than the previous global best plus ``beam`` are
    deactivated for good.  Equal final costs go to the smallest model id.
    """
    if not text:
        raise InputError("input must be non-empty")
    if len(lexicon) == 0:
        raise NoHypothesisError("empty lexicon")
    obs = lexicon.alphabet.encode(text)
    nets = [TokenNetwork.from_hmm(m.hmm, m.model_id) for m in lexicon]
    for net in nets:
        net.start(0.0)
    best = INF
    for t, sym in enumerate(obs, start=1):
        beam_prune(nets, best, beam)
        for net in nets:
            step_model(net, int(sym), t)
        best = global_best(nets)
    finals = sorted((net.exit_cost(), net.model_id) for net in nets if net.active)
    if not finals or finals[0][0] == INF:
        raise NoHypothesisError(f"no word model accepts {text!r}")
    cost, model_id = finals[0]
    return model_id, cost
