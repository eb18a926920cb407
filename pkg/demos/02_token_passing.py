"""
Token Passing
=============

Token Passing walks tokens through a state network one symbol at a time.
On a single HMM the exit token ends up with the Viterbi cost; on a
network built from a word it computes a weighted edit distance.
"""
import numpy as np

from lexrec import hmm as H
from lexrec.tokens import TokenNetwork, step_model, wld_distance

rng = np.random.default_rng(0)
trans = rng.random((4, 4))
trans /= trans.sum(axis=1, keepdims=True)
obs = rng.random((3, 2))
obs /= obs.sum(axis=1, keepdims=True)
model = H.Hmm(trans, obs)

seq = [0, 1, 1, 0, 1]
net = TokenNetwork.from_hmm(model)
net.start(0.0)
for t, sym in enumerate(seq, 1):
    step_model(net, sym, t)
    print(f"t={t} best token cost {net.best_cost():.4f}")
print(f"exit token {net.exit_cost():.6f}, Viterbi {H.viterbi_cost(model, seq)[0]:.6f}")

# Weighted Levenshtein distance: substitution p, insertion q, deletion r.
for x, y in [("kitten", "sitting"), ("show", "sohw"), ("roses", "roses")]:
    print(f"wld({x!r}, {y!r}) = {wld_distance(x, y, 1.0, 1.0, 1.0)}")
print("cheap insertions:", wld_distance("show", "shpow", p=2.0, q=0.5, r=2.0))
