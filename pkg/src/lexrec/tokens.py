"""Token Passing: cost-carrying tokens moving through state networks.

A :class:`TokenNetwork` is a cost network (``-ln`` transition and local
costs) where each state can hold a token.  Tokens that leave one network for
another are chained together through immutable :class:`WordLinkRecord`
objects, so the word sequence behind any token can be recovered by
:func:`backtrack`.

A network may carry several *layers* of tokens, one per context that can
hypothesise it (see :mod:`lexrec.ctr`).  With ``n_best = 1`` each state keeps
only the cheapest token over all layers; with larger ``n_best`` up to that
many tokens with distinct contexts survive in every state.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterable

import numpy as np

from .errors import CorruptionError, ParameterError
from .hmm import Hmm

INF = math.inf


@dataclass(frozen=True, slots=True, eq=False)
class WordLinkRecord:
    """A hypothesised word boundary.

    ``cost`` is the path cost when the record was created, ``time`` the
    number of characters consumed at that point and ``word`` the identifier
    of the model the token left.  ``context`` is the language-model state the
    word was hypothesised from.
    """

    cost: float
    prev: "WordLinkRecord | None"
    time: int
    word: str
    context: int | None = None

    @property
    def is_root(self) -> bool:
        return self.prev is None and self.word == ROOT_ID


ROOT_ID = "*"


def root_record() -> WordLinkRecord:
    return WordLinkRecord(0.0, None, 0, ROOT_ID)


@dataclass(slots=True)
class Token:
    cost: float
    path: WordLinkRecord | None = None
    origin: int = 0
    word: str | None = None  # set once the token has left a word model


def backtrack(record: WordLinkRecord) -> list[WordLinkRecord]:
    """Records from the first word to ``record``, root excluded."""
    chain = []
    node = record
    while node is not None and not node.is_root:
        chain.append(node)
        node = node.prev
    if node is None:
        raise CorruptionError("word link chain does not end at the root record")
    chain.reverse()
    for a, b in zip(chain, chain[1:]):
        if b.time < a.time:
            raise CorruptionError("word link times decrease along the chain")
    return chain


class TokenNetwork:
    """State network holding tokens.

    ``trans_cost`` is ``N x N`` (``inf`` where there is no arc) and
    ``obs_cost`` ``N x K``; state 0 is the entry and state ``N-1`` the exit.
    ``origins`` lists the context carried by each token layer.
    """

    def __init__(self, trans_cost, obs_cost, model_id: str = "", origins=(0,), n_best: int = 1):
        if n_best < 1:
            raise ParameterError("n_best must be at least 1")
        self.trans_cost = np.asarray(trans_cost, dtype=float)
        self.obs_cost = np.asarray(obs_cost, dtype=float)
        n = self.trans_cost.shape[0]
        if self.trans_cost.shape != (n, n) or self.obs_cost.shape[0] != n or n < 3:
            raise ParameterError("inconsistent network cost matrices")
        self.model_id = model_id
        self.origins = tuple(origins)
        self._layer = {o: i for i, o in enumerate(self.origins)}
        self.n_best = n_best
        self.cost = np.full((len(self.origins), n), INF)
        self.path = np.full((len(self.origins), n), None, dtype=object)
        self.active = False
        # static slices used by step_model
        self._tc_emit = self.trans_cost[None, :-1, 1:-1]
        self._tc_exit = self.trans_cost[1:-1, -1]

    @classmethod
    def from_hmm(cls, hmm: Hmm, model_id: str = "", origins=(0,), n_best: int = 1):
        tc, oc = hmm.costs()
        return cls(tc, oc, model_id, origins, n_best)

    @property
    def num_states(self) -> int:
        return self.trans_cost.shape[0]

    def clear(self) -> None:
        self.cost.fill(INF)
        self.path.fill(None)

    def deactivate(self) -> None:
        self.clear()
        self.active = False

    def start(self, cost: float = 0.0, path=None, origin=None) -> None:
        """Place a token in the entry state, keeping the cheaper of two."""
        layer = 0 if origin is None else self._layer[origin]
        if cost < self.cost[layer, 0]:
            self.cost[layer, 0] = cost
            self.path[layer, 0] = path
        self.active = True

    def best_cost(self) -> float:
        return float(self.cost.min())

    def exit_cost(self) -> float:
        return float(self.cost[:, -1].min())

    def tokens(self, state: int) -> list[Token]:
        out = [
            Token(float(self.cost[l, state]), self.path[l, state], self.origins[l])
            for l in range(len(self.origins))
            if self.cost[l, state] < INF
        ]
        out.sort(key=lambda tok: tok.cost)
        return out

    def exit_tokens(self) -> list[Token]:
        return self.tokens(self.num_states - 1)

    def _cap(self, costs: np.ndarray) -> None:
        # keep the n_best cheapest layers per column, in place
        if costs.shape[0] <= self.n_best:
            return
        order = np.argsort(costs, axis=0, kind="stable")
        np.put_along_axis(costs, order[self.n_best :], INF, axis=0)


def step_model(net: TokenNetwork, symbol: int, t: int | None = None) -> TokenNetwork:
    """Advance every token of ``net`` by one input symbol.

    Token copies move along every arc into the emitting states, adding the
    transition cost and the local cost of ``symbol``; each state keeps its
    cheapest token(s).  Then the exit transition is hypothesised, so the exit
    state holds the best alignment ending with this symbol.  ``t`` is only
    informative: the network itself is time-synchronous and keeps no clock.
    """
    if not net.active:
        return net
    scores = net.cost[:, :-1, None] + net._tc_emit  # (layer, source, emitting dest)
    src = scores.argmin(axis=1)
    emit = scores.min(axis=1)
    emit += net.obs_cost[1:-1, symbol]
    net._cap(emit)
    layers = np.arange(net.cost.shape[0])
    emit_path = net.path[layers[:, None], src]

    leave = emit + net._tc_exit
    last = leave.argmin(axis=1)
    exit_cost = leave.min(axis=1)[:, None]
    exit_path = emit_path[layers, last]
    net._cap(exit_cost)

    net.cost[:, 0] = INF
    net.cost[:, 1:-1] = emit
    net.cost[:, -1] = exit_cost[:, 0]
    net.path[:, 0] = None
    net.path[:, 1:-1] = emit_path
    net.path[:, -1] = exit_path
    return net


def record_decisions(states: Iterable[list[Token]], t: int) -> list[WordLinkRecord]:
    """Create a word link record for every token in the given LD states.

    Each token must have left a word model (``token.word`` set).  The token
    is repointed at its new record; records are returned in creation order.
    """
    created = []
    for context, toks in enumerate(states):
        for tok in toks:
            wlr = WordLinkRecord(tok.cost, tok.path, t, tok.word, context)
            tok.path = wlr
            created.append(wlr)
    return created


def global_best(networks: Iterable[TokenNetwork]) -> float:
    """Cheapest token in any state of any active network."""
    return min((net.best_cost() for net in networks if net.active), default=INF)


def beam_prune(networks, best: float, beam: float) -> set[int]:
    """Deactivate every active network whose best token is outside the beam.

    Returns the indices of the networks that were deactivated.
    """
    if beam < 0 or math.isnan(beam):
        raise ParameterError("beam width must be non-negative")
    dropped = set()
    if beam == INF:
        return dropped
    limit = best + beam
    for i, net in enumerate(networks):
        if net.active and net.best_cost() > limit:
            net.deactivate()
            dropped.add(i)
    return dropped


# ---------------------------------------------------------------------------
# weighted Levenshtein distance on a token network


def wld_network(word: str, p: float, q: float, r: float, alphabet: str) -> TokenNetwork:
    """Chain network for ``word`` with one insert state per gap.

    Character state ``j`` charges ``0`` for its own character and ``p``
    otherwise; insert states loop and charge ``q`` per character; skipping
    ``k`` character states costs ``k * r``.  Entry and exit states take care
    of edits at the word ends.
    """
    n = len(word)
    size = 2 * n + 3  # entry, n chars, n+1 insert states, exit
    exit_ = size - 1

    def ins(i):
        return n + 1 + i

    tc = np.full((size, size), INF)
    for i in range(n + 1):  # position i: entry (i=0) or character state i
        for s in (i, ins(i)):
            for j in range(i + 1, n + 1):
                tc[s, j] = (j - i - 1) * r
            tc[s, exit_] = (n - i) * r
        tc[i, ins(i)] = 0.0
        tc[ins(i), ins(i)] = 0.0

    oc = np.full((size, len(alphabet)), INF)
    for j, ch in enumerate(word, start=1):
        oc[j] = [0.0 if c == ch else p for c in alphabet]
    for i in range(n + 1):
        oc[ins(i)] = q
    return TokenNetwork(tc, oc, model_id=word)


def wld_distance(word_x: str, word_y: str, p: float = 1.0, q: float = 1.0, r: float = 1.0) -> float:
    """Weighted edit cost of turning ``word_x`` into ``word_y``.

    ``p`` weighs substitutions, ``q`` insertions and ``r`` deletions.  The
    value is computed by passing tokens through :func:`wld_network`.
    """
    if not word_x:
        raise ParameterError("word_x must contain at least one character")
    if min(p, q, r) < 0:
        raise ParameterError("edit weights must be non-negative")
    if not word_y:
        return len(word_x) * r
    alphabet = "".join(sorted(set(word_x) | set(word_y)))
    index = {c: i for i, c in enumerate(alphabet)}
    net = wld_network(word_x, p, q, r, alphabet)
    net.start(0.0)
    for t, ch in enumerate(word_y, start=1):
        step_model(net, index[ch], t)
    return net.exit_cost()
