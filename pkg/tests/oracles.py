"""Independent reference computations used as test oracles.

Nothing in here calls into the recursions it is meant to check.
"""
import itertools
import math

import numpy as np


def random_hmm(rng, n_states, alphabet_size, sparsity=0.0):
    """Random stochastic (N-1)x(N-1) / (N-2)xK matrices.

    With ``sparsity`` > 0 some entries are zeroed (each row keeps at least one).
    """
    def rows(r, c):
        m = rng.random((r, c))
        if sparsity:
            m[rng.random((r, c)) < sparsity] = 0.0
            for i in range(r):
                if m[i].sum() == 0:
                    m[i, rng.integers(c)] = 1.0
        return m / m.sum(axis=1, keepdims=True)

    return rows(n_states - 1, n_states - 1), rows(n_states - 2, alphabet_size)


def full(trans, obs):
    n = trans.shape[0] + 1
    a = np.zeros((n, n))
    a[: n - 1, 1:] = trans
    b = np.zeros((n, obs.shape[1]))
    b[1 : n - 1] = obs
    return a, b


def path_probs(trans, obs, seq):
    """Yield (state path, P(O, Q)) for every emitting-state path."""
    a, b = full(trans, obs)
    n = a.shape[0]
    for path in itertools.product(range(1, n - 1), repeat=len(seq)):
        p = a[0, path[0]] * b[path[0], seq[0]]
        for t in range(1, len(seq)):
            p *= a[path[t - 1], path[t]] * b[path[t], seq[t]]
        p *= a[path[-1], n - 1]
        yield path, p


def path_prob_array(trans, obs, seq):
    """``(paths, probs)`` for every emitting-state path, enumerated in bulk."""
    a, b = full(trans, obs)
    n = a.shape[0]
    paths = np.array(list(itertools.product(range(1, n - 1), repeat=len(seq))), dtype=int)
    probs = a[0, paths[:, 0]] * b[paths[:, 0], seq[0]]
    for t in range(1, len(seq)):
        probs = probs * a[paths[:, t - 1], paths[:, t]] * b[paths[:, t], seq[t]]
    return paths, probs * a[paths[:, -1], n - 1]


def brute_total(trans, obs, seq):
    return math.fsum(p for _, p in path_probs(trans, obs, seq))


def brute_max(trans, obs, seq):
    best_p, best_path = 0.0, None
    for path, p in path_probs(trans, obs, seq):
        if p > best_p:
            best_p, best_path = p, list(path)
    return best_p, best_path


def brute_beta(trans, obs, seq, t, i):
    """P(o_{t+1..T}, exit | X_t = i) by enumerating suffix paths."""
    a, b = full(trans, obs)
    n = a.shape[0]
    T = len(seq)
    if t == T:
        return a[i, n - 1]
    total = []
    for suffix in itertools.product(range(1, n - 1), repeat=T - t):
        p = a[i, suffix[0]] * b[suffix[0], seq[t]]
        for s in range(1, len(suffix)):
            p *= a[suffix[s - 1], suffix[s]] * b[suffix[s], seq[t + s]]
        total.append(p * a[suffix[-1], n - 1])
    return math.fsum(total)


def levenshtein_weighted(x, y, p, q, r):
    """Textbook DP: cost of turning x into y with substitution p,
    insertion q (character of y not in x) and deletion r."""
    d = [[0.0] * (len(y) + 1) for _ in range(len(x) + 1)]
    for i in range(1, len(x) + 1):
        d[i][0] = i * r
    for j in range(1, len(y) + 1):
        d[0][j] = j * q
    for i in range(1, len(x) + 1):
        for j in range(1, len(y) + 1):
            d[i][j] = min(
                d[i - 1][j] + r,
                d[i][j - 1] + q,
                d[i - 1][j - 1] + (0.0 if x[i - 1] == y[j - 1] else p),
            )
    return d[len(x)][len(y)]


def brute_ctr(ld_trans_cost, word_ld_costs, od_cost, text):
    """Exhaustive minimum over segmentations x word sequences x contexts.

    ``word_ld_costs[w]`` holds ``-ln b_j(w)`` per language-model state and
    ``od_cost(w, segment)`` the word model's alignment cost.  Branches are
    cut once their partial cost reaches the best complete reading; all
    costs are non-negative so the cut never loses the optimum.
    Returns ``(cost, [(word, end, context), ...])``.
    """
    T = len(text)
    exit_ = ld_trans_cost.shape[0] - 1
    cache = {}

    def od(w, a, b):
        key = (w, a, b)
        if key not in cache:
            cache[key] = od_cost(w, text[a:b])
        return cache[key]

    best = [math.inf, None]

    def search(pos, prev, cost, trail):
        for end in range(pos + 1, T + 1):
            for w, costs in word_ld_costs.items():
                d = od(w, pos, end)
                if d == math.inf:
                    continue
                for j in range(1, exit_):
                    c = cost + ld_trans_cost[prev, j] + costs[j] + d
                    if not c < best[0]:
                        continue
                    step = trail + [(w, end, j)]
                    if end == T:
                        total = c + ld_trans_cost[j, exit_]
                        if total < best[0]:
                            best[0], best[1] = total, step
                    else:
                        search(end, j, c, step)

    search(0, 0, 0.0, [])
    return best[0], best[1]
