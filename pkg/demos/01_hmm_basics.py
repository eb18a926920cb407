"""
Discrete HMMs with entry and exit states
========================================

A three-state model over the symbols ``x`` and ``y``: probability of a
sequence, its best state path, and a few rounds of Baum-Welch.
"""
import numpy as np

from lexrec import hmm as H

# Rows are source states (entry, s1, s2), columns destinations (s1, s2, exit).
transitions = [
    [0.7, 0.3, 0.0],
    [0.0, 0.6, 0.4],
    [0.0, 0.5, 0.5],
]
observations = [
    [0.9, 0.1],  # s1 mostly says x
    [0.2, 0.8],  # s2 mostly says y
]
model = H.Hmm(transitions, observations, symbols=["x", "y"])

seq = [0, 0, 1, 1]
fwd = H.forward(model, seq)
print(f"P(xxyy) = {fwd.prob:.6f}  (log {fwd.log_prob:.4f})")

prob, path = H.viterbi(model, seq)
cost, _ = H.viterbi_cost(model, seq)
print(f"best path {path} with probability {prob:.6f}, cost {cost:.4f} = -ln p")

# Baum-Welch on a small corpus; the log-likelihood never goes down.
corpus = [[0, 0, 1], [0, 1, 1, 1], [0, 0, 0, 1]]
history = []
trained = H.baum_welch_multi(model, corpus, max_iters=15, conv_eps=0.0, history=history)
print("log-likelihood per iteration:", " ".join(f"{ll:.3f}" for ll in history))
assert all(b >= a - 1e-12 for a, b in zip(history, history[1:]))

np.set_printoptions(precision=3, suppress=True)
print("reestimated transitions (exit column last):")
print(trained.transitions)

# Additive smoothing lifts zero probabilities without breaking row sums.
smoothed = H.smooth_observations(trained, 1e-3)
print("smoothed observations:")
print(smoothed.observations)

# Models round-trip through a plain text format.
assert H.loads(H.dumps(trained)) == trained
