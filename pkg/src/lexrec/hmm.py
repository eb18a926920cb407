"""Discrete HMM with a non-emitting entry state and an absorbing exit state.

States are indexed ``0 .. N-1``: state ``0`` is the entry state, state
``N-1`` the exit state and ``1 .. N-2`` are emitting.  Observation symbols
are indexed ``0 .. K-1``.  There are no transitions into the entry state and
none out of the exit state; the exit transition ``a[i, N-1]`` is taken once,
after the last symbol has been emitted.

Probability-domain routines (``forward``, ``backward``, Baum-Welch) scale
the trellis at every time step, so they are safe for long sequences.  The
cost-domain Viterbi works with ``-ln p`` and uses ``inf`` for impossible
events.
"""
from __future__ import annotations

import io
import json
import logging
import math
from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

from .errors import InputError, NumericError, ParameterError, TrainingError

log = logging.getLogger(__name__)

ROW_TOL = 1e-9
FORMAT_TAG = "lexrec-hmm"
FORMAT_VERSION = 1


def neg_log(p):
    """Elementwise ``-ln p`` with ``-ln 0 = inf``."""
    p = np.asarray(p, dtype=float)
    with np.errstate(divide="ignore"):
        return -np.log(p)


class Hmm:
    """Immutable discrete HMM ``<A, B>`` with entry and exit states.

    ``transitions`` is the ``(N-1) x (N-1)`` matrix whose rows are the source
    states ``0 .. N-2`` and whose columns are the destination states
    ``1 .. N-1``.  ``observations`` is ``(N-2) x K``, one row per emitting
    state.  ``symbols`` optionally labels the ``K`` observables.
    """

    def __init__(self, transitions, observations, symbols: Sequence | None = None):
        trans = np.array(transitions, dtype=float, ndmin=2)
        obs = np.array(observations, dtype=float, ndmin=2)
        if trans.shape[0] != trans.shape[1] or trans.shape[0] < 2:
            raise ParameterError(f"transition matrix must be square with N-1 >= 2, got {trans.shape}")
        n = trans.shape[0] + 1
        if obs.shape[0] != n - 2 or obs.shape[1] < 1:
            raise ParameterError(f"observation matrix must be {n - 2} x K, got {obs.shape}")
        _check_stochastic(trans, "transition")
        _check_stochastic(obs, "observation")

        a = np.zeros((n, n))
        a[: n - 1, 1:] = trans
        b = np.zeros((n, obs.shape[1]))
        b[1 : n - 1] = obs
        a.setflags(write=False)
        b.setflags(write=False)
        self.a = a
        self.b = b
        if symbols is not None:
            symbols = tuple(symbols)
            if len(symbols) != b.shape[1]:
                raise ParameterError(f"{len(symbols)} symbol labels for K={b.shape[1]}")
        self.symbols = symbols
        self._costs = None

    @property
    def num_states(self) -> int:
        return self.a.shape[0]

    @property
    def alphabet_size(self) -> int:
        return self.b.shape[1]

    @property
    def transitions(self) -> np.ndarray:
        return self.a[:-1, 1:]

    @property
    def observations(self) -> np.ndarray:
        return self.b[1:-1]

    @property
    def exit(self) -> int:
        return self.num_states - 1

    def costs(self) -> tuple[np.ndarray, np.ndarray]:
        """``(-ln a, -ln b)`` as full ``N x N`` and ``N x K`` arrays."""
        if self._costs is None:
            tc, oc = neg_log(self.a), neg_log(self.b)
            tc.setflags(write=False)
            oc.setflags(write=False)
            self._costs = (tc, oc)
        return self._costs

    def replace(self, transitions=None, observations=None) -> "Hmm":
        return Hmm(
            self.transitions if transitions is None else transitions,
            self.observations if observations is None else observations,
            self.symbols,
        )

    def symbol_index(self, label) -> int:
        if self.symbols is None:
            raise InputError("model has no symbol table")
        try:
            return self.symbols.index(label)
        except ValueError:
            raise InputError(f"unknown symbol {label!r}") from None

    def __eq__(self, other):
        if not isinstance(other, Hmm):
            return NotImplemented
        return (
            np.array_equal(self.a, other.a)
            and np.array_equal(self.b, other.b)
            and self.symbols == other.symbols
        )

    def __repr__(self):
        return f"Hmm(N={self.num_states}, K={self.alphabet_size})"


def _check_stochastic(m: np.ndarray, what: str) -> None:
    if not np.all(np.isfinite(m)):
        raise NumericError(f"{what} matrix contains NaN or inf")
    if np.any(m < 0) or np.any(m > 1 + ROW_TOL):
        raise ParameterError(f"{what} probabilities must lie in [0, 1]")
    bad = np.flatnonzero(np.abs(m.sum(axis=1) - 1.0) > ROW_TOL)
    if bad.size:
        raise ParameterError(f"{what} rows {bad.tolist()} do not sum to 1")


def as_observations(hmm: Hmm, obs) -> np.ndarray:
    o = np.asarray(obs)
    if o.ndim != 1 or o.size == 0:
        raise InputError("observation sequence must be a non-empty 1-d sequence")
    if not np.issubdtype(o.dtype, np.integer):
        raise InputError("observation symbols must be integer indices")
    if o.min() < 0 or o.max() >= hmm.alphabet_size:
        raise InputError(f"symbol index out of range 0..{hmm.alphabet_size - 1}")
    return o.astype(np.intp)


# ---------------------------------------------------------------------------
# Task 1: evaluation


@dataclass(frozen=True)
class Forward:
    """Scaled forward trellis.

    ``alpha_hat[t]`` is ``alpha_t`` divided by ``scale[1] * ... * scale[t]``;
    ``final`` is the scaled termination sum so that
    ``P(O|M) = prod(scale) * final``.
    """

    alpha_hat: np.ndarray
    scale: np.ndarray
    final: float
    log_prob: float

    @property
    def prob(self) -> float:
        return math.exp(self.log_prob)

    @property
    def alpha(self) -> np.ndarray:
        return self.alpha_hat * np.cumprod(self.scale)[:, None]


@dataclass(frozen=True)
class Backward:
    beta_hat: np.ndarray
    log_tail: np.ndarray  # ln of the factor restoring beta_t from beta_hat_t

    @property
    def beta(self) -> np.ndarray:
        with np.errstate(over="ignore"):
            return self.beta_hat * np.exp(self.log_tail)[:, None]


def forward(hmm: Hmm, obs) -> Forward:
    """Forward pass; ``result.prob`` is ``P(O|M)`` and ``result.log_prob`` its log."""
    o = as_observations(hmm, obs)
    a, b = hmm.a, hmm.b
    n, T = hmm.num_states, len(o)
    alpha = np.zeros((T + 1, n))
    scale = np.ones(T + 1)
    alpha[0, 0] = 1.0
    log_p = 0.0
    for t in range(T):
        nxt = (alpha[t] @ a) * b[:, o[t]]
        c = nxt.sum()
        if c == 0.0:
            scale[t + 1 :] = 0.0
            return Forward(alpha, scale, 0.0, -math.inf)
        alpha[t + 1] = nxt / c
        scale[t + 1] = c
        log_p += math.log(c)
    final = float(alpha[T] @ a[:, -1])
    if final == 0.0:
        return Forward(alpha, scale, 0.0, -math.inf)
    return Forward(alpha, scale, final, log_p + math.log(final))


def backward(hmm: Hmm, obs, fwd: Forward | None = None) -> Backward:
    """Backward pass, scaled with the forward coefficients when ``P(O|M) > 0``.

    ``result.beta[0, 0]`` equals ``P(O|M)``.
    """
    o = as_observations(hmm, obs)
    if fwd is None:
        fwd = forward(hmm, o)
    a, b = hmm.a, hmm.b
    n, T = hmm.num_states, len(o)
    beta = np.zeros((T + 1, n))
    beta[T, : n - 1] = a[: n - 1, -1]
    log_tail = np.zeros(T + 1)
    if fwd.log_prob == -math.inf:
        # unscaled: nothing to normalise against
        for t in range(T - 1, -1, -1):
            beta[t] = a @ (b[:, o[t]] * beta[t + 1])
        return Backward(beta, log_tail)
    beta[T] /= fwd.final
    log_tail[T] = math.log(fwd.final)
    for t in range(T - 1, -1, -1):
        c = fwd.scale[t + 1]
        beta[t] = (a @ (b[:, o[t]] * beta[t + 1])) / c
        log_tail[t] = log_tail[t + 1] + math.log(c)
    return Backward(beta, log_tail)


def probability(hmm: Hmm, obs) -> float:
    return forward(hmm, obs).prob


def log_likelihood(hmm: Hmm, corpus: Iterable) -> float:
    return float(sum(forward(hmm, o).log_prob for o in corpus))


# ---------------------------------------------------------------------------
# Task 2: decoding


def viterbi(hmm: Hmm, obs) -> tuple[float, list[int]]:
    """Best state sequence in the probability domain.

    Returns ``(P(O, Q*|M), [q_1, ..., q_T])``; ties go to the lowest
    predecessor index.  An impossible observation gives ``(0.0, [])``.
    """
    o = as_observations(hmm, obs)
    a, b = hmm.a, hmm.b
    n, T = hmm.num_states, len(o)
    phi = np.zeros((T + 1, n))
    psi = np.zeros((T + 1, n), dtype=np.intp)
    phi[0, 0] = 1.0
    for t in range(1, T + 1):
        scores = phi[t - 1][:, None] * a
        psi[t] = scores.argmax(axis=0)
        phi[t] = scores[psi[t], np.arange(n)] * b[:, o[t - 1]]
    last = phi[T] * a[:, -1]
    q = int(last.argmax())
    p = float(last[q])
    if p == 0.0:
        return 0.0, []
    return p, _backtrack(psi, q, T)


def viterbi_cost(hmm: Hmm, obs) -> tuple[float, list[int]]:
    """Viterbi in the cost domain: ``(-ln P(O, Q*|M), path)``, ``inf`` if impossible."""
    o = as_observations(hmm, obs)
    tc, oc = hmm.costs()
    n, T = hmm.num_states, len(o)
    delta = np.full((T + 1, n), np.inf)
    psi = np.zeros((T + 1, n), dtype=np.intp)
    delta[0, 0] = 0.0
    for t in range(1, T + 1):
        scores = delta[t - 1][:, None] + tc
        psi[t] = scores.argmin(axis=0)
        delta[t] = scores[psi[t], np.arange(n)] + oc[:, o[t - 1]]
    last = delta[T] + tc[:, -1]
    q = int(last.argmin())
    cost = float(last[q])
    if cost == math.inf:
        return math.inf, []
    return cost, _backtrack(psi, q, T)


def _backtrack(psi: np.ndarray, q: int, T: int) -> list[int]:
    path = [q]
    for t in range(T, 1, -1):
        q = int(psi[t, q])
        path.append(q)
    path.reverse()
    return path


# ---------------------------------------------------------------------------
# Task 3: Baum-Welch reestimation


def _expected_counts(hmm: Hmm, seqs: list[np.ndarray]):
    """Pooled expected transition/emission counts and their normalisers."""
    a, b = hmm.a, hmm.b
    n, k = hmm.num_states, hmm.alphabet_size
    trans = np.zeros((n, n))
    emit = np.zeros((n, k))
    occupancy = np.zeros(n)
    total_ll = 0.0
    for o in seqs:
        fwd = forward(hmm, o)
        if fwd.log_prob == -math.inf:
            raise TrainingError("model assigns zero probability to a training sequence")
        bwd = backward(hmm, o, fwd)
        alpha, beta = fwd.alpha_hat, bwd.beta_hat
        T = len(o)
        gamma = alpha * beta  # gamma[t, i] = alpha_t(i) beta_t(i) / P(O|M)
        emitted = (b[:, o].T * beta[1:]) / fwd.scale[1:, None]
        trans += np.einsum("ti,ij,tj->ij", alpha[:-1], a, emitted)
        trans[:, -1] += alpha[T] * a[:, -1] / fwd.final
        np.add.at(emit.T, o, gamma[1:])
        occupancy += gamma.sum(axis=0)
        total_ll += fwd.log_prob
    return trans, emit, occupancy, total_ll


def _apply_counts(hmm: Hmm, trans, emit, occupancy) -> Hmm:
    n = hmm.num_states
    a_new = hmm.a.copy()
    b_new = hmm.b.copy()
    for i in range(n - 1):
        if occupancy[i] > 0:
            a_new[i] = trans[i] / occupancy[i]
    for j in range(1, n - 1):
        if occupancy[j] > 0:
            b_new[j] = emit[j] / occupancy[j]
    if not (np.all(np.isfinite(a_new)) and np.all(np.isfinite(b_new))):
        raise NumericError("reestimation produced NaN")
    np.clip(a_new, 0.0, 1.0, out=a_new)
    np.clip(b_new, 0.0, 1.0, out=b_new)
    return Hmm(a_new[:-1, 1:], b_new[1:-1], hmm.symbols)


def reestimate(hmm: Hmm, corpus) -> tuple[Hmm, float]:
    """One Baum-Welch step over ``corpus``; returns the new model and the
    corpus log-likelihood under the *old* one."""
    seqs = [as_observations(hmm, o) for o in corpus]
    trans, emit, occ, ll = _expected_counts(hmm, seqs)
    return _apply_counts(hmm, trans, emit, occ), ll


def baum_welch_multi(
    hmm: Hmm,
    corpus,
    max_iters: int = 100,
    conv_eps: float = 1e-6,
    history: list | None = None,
) -> Hmm:
    """Baum-Welch over several sequences, pooling expected counts.

    Sequences the initial model cannot generate are skipped with a warning.
    Iteration stops once the corpus log-likelihood improves by less than
    ``conv_eps`` or after ``max_iters`` reestimations.  If ``history`` is
    given, the log-likelihood of every visited model is appended to it.
    """
    if max_iters < 0 or conv_eps < 0:
        raise ParameterError("max_iters and conv_eps must be non-negative")
    seqs = [as_observations(hmm, o) for o in corpus]
    usable = [o for o in seqs if forward(hmm, o).log_prob > -math.inf]
    if not usable:
        raise TrainingError("no training sequence has non-zero probability")
    if len(usable) < len(seqs):
        log.warning("skipping %d impossible training sequence(s)", len(seqs) - len(usable))

    model = hmm
    prev_ll = None
    for it in range(max_iters + 1):
        trans, emit, occ, ll = _expected_counts(model, usable)
        if history is not None:
            history.append(ll)
        if prev_ll is not None and ll - prev_ll < conv_eps:
            break
        if it == max_iters:
            break
        model = _apply_counts(model, trans, emit, occ)
        prev_ll = ll
    return model


def baum_welch(hmm: Hmm, obs, max_iters: int = 100, conv_eps: float = 1e-6, history=None) -> Hmm:
    """Baum-Welch on a single observation sequence."""
    if forward(hmm, obs).log_prob == -math.inf:
        raise TrainingError("model cannot generate the training sequence")
    return baum_welch_multi(hmm, [obs], max_iters, conv_eps, history)


# ---------------------------------------------------------------------------
# smoothing


def smooth_additive(row, eps: float, eligible=None) -> np.ndarray:
    """Raise every eligible zero entry to ``eps`` and scale the rest down.

    With ``z`` raised entries the non-zero entries are multiplied by
    ``1 - eps * z``.  Zero entries outside ``eligible`` stay exactly zero.
    """
    row = np.asarray(row, dtype=float)
    if abs(row.sum() - 1.0) > ROW_TOL:
        raise ParameterError("row must sum to 1 before smoothing")
    mask = np.ones(row.shape, dtype=bool) if eligible is None else np.asarray(eligible, dtype=bool)
    zeros = mask & (row == 0.0)
    z = int(zeros.sum())
    if z == 0:
        return row.copy()
    if not eps > 0 or eps * z >= 1.0:
        raise ParameterError(f"eps={eps} cannot be assigned to {z} unseen events")
    out = row * (1.0 - eps * z)
    out[zeros] = eps
    return out


def smooth_observations(hmm: Hmm, eps: float, eligible=None) -> Hmm:
    """Additively smooth every emitting state's observation row.

    ``eligible`` is an optional ``(N-2) x K`` boolean mask.
    """
    obs = hmm.observations
    rows = [
        smooth_additive(obs[j], eps, None if eligible is None else eligible[j])
        for j in range(obs.shape[0])
    ]
    return hmm.replace(observations=np.array(rows))


def smooth_transitions(hmm: Hmm, eps: float, eligible) -> Hmm:
    """Additively smooth the transition rows over an ``(N-1) x (N-1)`` mask."""
    trans = hmm.transitions
    rows = [smooth_additive(trans[i], eps, eligible[i]) for i in range(trans.shape[0])]
    return hmm.replace(transitions=np.array(rows))


# ---------------------------------------------------------------------------
# text serialisation


def dumps(hmm: Hmm) -> str:
    out = io.StringIO()
    out.write(f"{FORMAT_TAG} {FORMAT_VERSION}\n")
    out.write(f"N {hmm.num_states}\nK {hmm.alphabet_size}\n")
    if hmm.symbols is None:
        out.write("symbols none\n")
    else:
        out.write("symbols\n")
        for s in hmm.symbols:
            out.write(json.dumps(s) + "\n")
    out.write("transitions\n")
    for row in hmm.transitions:
        out.write(" ".join(repr(float(x)) for x in row) + "\n")
    out.write("observations\n")
    for row in hmm.observations:
        out.write(" ".join(repr(float(x)) for x in row) + "\n")
    return out.getvalue()


def loads(text: str) -> Hmm:
    lines = iter(text.splitlines())
    try:
        tag, version = next(lines).split()
        if tag != FORMAT_TAG:
            raise InputError(f"not a {FORMAT_TAG} file")
        if int(version) != FORMAT_VERSION:
            raise InputError(f"unsupported {FORMAT_TAG} version {version}")
        n = int(_field(next(lines), "N"))
        k = int(_field(next(lines), "K"))
        head = next(lines)
        symbols = None
        if head == "symbols":
            symbols = [json.loads(next(lines)) for _ in range(k)]
        elif head != "symbols none":
            raise InputError("missing symbol table")
        if next(lines) != "transitions":
            raise InputError("missing transitions section")
        trans = [[float(x) for x in next(lines).split()] for _ in range(n - 1)]
        if next(lines) != "observations":
            raise InputError("missing observations section")
        obs = [[float(x) for x in next(lines).split()] for _ in range(n - 2)]
    except StopIteration:
        raise InputError("truncated model file") from None
    except ValueError as exc:
        raise InputError(f"malformed model file: {exc}") from None
    return Hmm(trans, obs, symbols)


def _field(line: str, name: str) -> str:
    key, _, value = line.partition(" ")
    if key != name:
        raise InputError(f"expected field {name!r}, got {line!r}")
    return value


def save(hmm: Hmm, path) -> None:
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(dumps(hmm))


def load(path) -> Hmm:
    with open(path, encoding="utf-8") as fh:
        return loads(fh.read())
