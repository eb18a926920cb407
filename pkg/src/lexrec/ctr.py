"""Connected text recognition: the language model and the word models
decoded together with Token Passing.

For every input character the loop below

1. lets each language-model context hypothesise the words it can observe,
   placing tokens in their models' entry states,
2. advances every active word model by the character (models far outside
   the beam are switched off until hypothesised again),
3. passes tokens that reached a word model's exit state back to the
   context that hypothesised them, recording a word boundary for each,
4. and offers every context's token to the language model's exit state.

After the last character the exit token of the language model holds the
cost of the best reading, and its word link chain spells it out.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Iterable

import numpy as np

from .errors import InputError, NoHypothesisError, ParameterError
from .ld import LdModel
from .od import Lexicon, best_word_isolated
from .tokens import (
    INF,
    Token,
    TokenNetwork,
    backtrack as _chain,
    beam_prune,
    global_best,
    record_decisions,
    root_record,
    step_model,
)

recognize_isolated = best_word_isolated


@dataclass(frozen=True)
class RecognizerConfig:
    beam_width: float = INF
    n_best: int = 1
    emit_tags: bool = False

    def __post_init__(self):
        if not isinstance(self.n_best, (int, np.integer)) or self.n_best < 1:
            raise ParameterError("n_best must be an integer >= 1")
        if math.isnan(self.beam_width) or self.beam_width < 0:
            raise ParameterError("beam_width must be non-negative")


@dataclass(frozen=True)
class RecognitionResult:
    """A reading of the input.

    ``words`` are model ids, ``boundaries`` the number of characters
    consumed at the end of each word and ``tags`` the language-model context
    of each word (``None`` unless requested).  ``alternatives`` lists up to
    ``n_best`` readings in cost order, starting with this one.
    """

    words: tuple[str, ...]
    boundaries: tuple[int, ...]
    total_cost: float
    tags: tuple[str, ...] | None = None
    contexts: tuple[int, ...] = ()
    alternatives: tuple["RecognitionResult", ...] = field(default=(), repr=False)

    @property
    def plain_words(self) -> list[str]:
        return [w.lstrip(" ") or w for w in self.words]

    @property
    def text(self) -> str:
        return " ".join(self.plain_words)

    def tagged_text(self) -> str:
        if self.tags is None:
            raise ParameterError("result carries no tags")
        return " ".join(f"{w}/{t}" for w, t in zip(self.plain_words, self.tags))

    def segments(self, text: str) -> list[str]:
        """The input split at the recognised word boundaries."""
        starts = (0,) + self.boundaries[:-1]
        return [text[a:b] for a, b in zip(starts, self.boundaries)]


def backtrack(final) -> tuple[list[str], list[int], list[int]]:
    """Words, boundaries and contexts recorded behind a token or record."""
    record = final.path if isinstance(final, Token) else final
    if record is None:
        raise InputError("token carries no word link record")
    chain = _chain(record)
    return [r.word for r in chain], [r.time for r in chain], [r.context for r in chain]


class Recognizer:
    """Shared, read-only decoding set-up for one language model and lexicon."""

    def __init__(self, ld: LdModel, lexicon: Lexicon, config: RecognizerConfig | None = None):
        self.ld = ld
        self.lexicon = lexicon
        self.config = config or RecognizerConfig()
        missing = ld.covers(lexicon.words)
        if missing:
            raise ParameterError(f"language model vocabulary lacks {missing[:5]}")
        # models in id order so equal costs resolve to the smallest id
        self._models = sorted(lexicon, key=lambda m: m.model_id)
        self._word_costs = []
        self._origins = []
        for m in self._models:
            wc = ld.word_costs(m.word)
            origins = tuple(int(j) for j in np.flatnonzero(np.isfinite(wc)))
            self._word_costs.append(wc)
            self._origins.append(origins)
        self.labels = ld.contexts

    def session(self) -> "Session":
        return Session(self)

    def recognize(self, text: str) -> RecognitionResult:
        if not text:
            raise InputError("input must be non-empty")
        s = self.session()
        s.feed(text)
        return s.finalize()


class Session:
    """Incremental recognition of one utterance.

    Characters are fed with :meth:`feed`; :meth:`finalize` returns the
    reading of everything fed so far and closes the session.
    """

    def __init__(self, recognizer: Recognizer):
        self.rec = recognizer
        ld = recognizer.ld
        self._n = recognizer.config.n_best
        self._beam = recognizer.config.beam_width
        self._tc = ld.trans_cost
        self._exit = ld.num_states - 1
        self._nets = []
        self._hyp = []  # (network, [(origin, word cost)])
        for m, origins, wc in zip(recognizer._models, recognizer._origins, recognizer._word_costs):
            if not origins:
                continue
            tc, oc = m.hmm.costs()
            net = TokenNetwork(tc, oc, m.model_id, origins, self._n)
            self._nets.append(net)
            self._hyp.append((net, [(j, float(wc[j])) for j in origins]))
        start = Token(0.0, root_record(), 0)
        self._ld_tokens = [[] for _ in range(ld.num_states)]
        self._ld_tokens[0] = [start]
        self._ld_exit: list[Token] = []
        self._best = INF
        self.t = 0
        self.closed = False

    def feed(self, text: str) -> "Session":
        if self.closed:
            raise InputError("session already finalized")
        for sym in self.rec.lexicon.alphabet.encode(text):
            self._step(int(sym))
        return self

    def _hypothesise(self):
        n_states = self._exit + 1
        best_cost = np.full(n_states, INF)
        best_path = [None] * n_states
        for i, toks in enumerate(self._ld_tokens):
            for tok in toks:
                cand = tok.cost + self._tc[i]
                better = np.flatnonzero(cand < best_cost)
                for j in better:
                    best_cost[j] = cand[j]
                    best_path[j] = tok.path
        for net, hyps in self._hyp:
            for j, wc in hyps:
                c = best_cost[j] + wc
                if c < INF:
                    net.start(c, best_path[j], origin=j)

    def _step(self, sym: int):
        self.t += 1
        t = self.t
        self._hypothesise()
        self._ld_tokens = [[] for _ in range(self._exit + 1)]

        if self._beam < INF:
            beam_prune(self._nets, self._best, self._beam)
        for net in self._nets:
            if net.active:
                step_model(net, sym, t)
                if net.best_cost() == INF:
                    net.deactivate()
        self._best = global_best(self._nets)

        arrivals = self._ld_tokens
        for net in self._nets:
            if net.active:
                for tok in net.exit_tokens():
                    tok.word = net.model_id
                    arrivals[tok.origin].append(tok)
        for j, toks in enumerate(arrivals):
            if toks:
                toks.sort(key=lambda tok: (tok.cost, tok.word))
                del toks[self._n :]
        record_decisions(arrivals, t)

        exits = []
        for i, toks in enumerate(arrivals):
            step = self._tc[i, self._exit]
            if step < INF:
                exits.extend(Token(tok.cost + step, tok.path, i, tok.word) for tok in toks)
        exits.sort(key=lambda tok: (tok.cost, tok.word))
        self._ld_exit = exits[: self._n]

    def finalize(self) -> RecognitionResult:
        if self.closed:
            raise InputError("session already finalized")
        self.closed = True
        if self.t == 0:
            raise InputError("no input was fed to the session")
        finals = [tok for tok in self._ld_exit if tok.cost < INF]
        if not finals:
            raise NoHypothesisError("no complete reading of the input")
        results = [self._result(tok) for tok in finals]
        return _with_alternatives(results[0], tuple(results))

    def _result(self, tok: Token) -> RecognitionResult:
        words, bounds, ctx = backtrack(tok)
        tags = None
        if self.rec.config.emit_tags:
            tags = tuple(self.rec.labels[c - 1] for c in ctx)
        return RecognitionResult(tuple(words), tuple(bounds), tok.cost, tags, tuple(ctx))


def _with_alternatives(best: RecognitionResult, alts) -> RecognitionResult:
    return RecognitionResult(best.words, best.boundaries, best.total_cost, best.tags, best.contexts, alts)


def recognize(ld: LdModel, lexicon: Lexicon, text: str, config: RecognizerConfig | None = None) -> RecognitionResult:
    """Most likely word sequence and segmentation of ``text``."""
    return Recognizer(ld, lexicon, config).recognize(text)


def recognize_nbest(
    ld: LdModel, lexicon: Lexicon, text: str, n: int, config: RecognizerConfig | None = None
) -> list[RecognitionResult]:
    """Readings found with ``n`` tokens per state, cheapest first."""
    if n < 1:
        raise ParameterError("n must be at least 1")
    base = config or RecognizerConfig()
    cfg = RecognizerConfig(base.beam_width, n, base.emit_tags)
    return list(recognize(ld, lexicon, text, cfg).alternatives)


def recognize_incremental(session: Session, next_char: str) -> Session:
    """Advance ``session`` by one more piece of input; see :meth:`Session.feed`."""
    return session.feed(next_char)


def recognize_lines(recognizer: Recognizer, lines: Iterable[str]):
    """Yield ``(line, result or None)``; ``None`` marks lines without a reading."""
    for line in lines:
        if not line:
            yield line, None
            continue
        try:
            yield line, recognizer.recognize(line)
        except NoHypothesisError:
            yield line, None
