"""The two scoring models and their flat weight vectors.

Builds a Bi-GRU and a DBN from random flat vectors, scores toy sequences,
pretrains the DBN with contrastive divergence on bimodal binary data, and
shows that flatten/unflatten round-trips exactly (which is what lets a
gradient-free optimizer own every parameter).

Run:  python demos/03_scoring_models.py
"""

import numpy as np

from earfake.bigru import bigru_score, flatten_w1, unflatten_w1, w1_param_count
from earfake.dbn import (
    dbn_forward,
    dbn_pretrain,
    flatten_w2,
    rbm_hidden_probs,
    rbm_visible_probs,
    unflatten_w2,
    w2_param_count,
)

rng = np.random.default_rng(3)

# --- Bi-GRU ---------------------------------------------------------------
input_dim, hidden_dim = 6, 4
n1 = w1_param_count(input_dim, hidden_dim)
print(f"Bi-GRU with input {input_dim}, hidden {hidden_dim}: {n1} parameters")

flat = rng.uniform(-1, 1, size=n1)
model = unflatten_w1(flat, input_dim, hidden_dim)
assert np.array_equal(flatten_w1(model), flat)
print("flatten(unflatten(w)) == w exactly")

sequence = rng.random((5, input_dim))
print(f"score of a 5-step sequence: {bigru_score(model, sequence):.4f}")
print(f"score of the reversed sequence: {bigru_score(model, sequence[::-1]):.4f} "
      "(differs: direction matters)\n")

# --- DBN ------------------------------------------------------------------
dims = [6, 4, 2]
n2 = w2_param_count(dims)
print(f"DBN with layer sizes {dims}: {n2} parameters")

protos = np.array([[1, 1, 1, 0, 0, 0], [0, 0, 0, 1, 1, 1]], dtype=float)
data = protos[rng.integers(0, 2, size=80)]
data = np.abs(data - (rng.random(data.shape) < 0.05))

before = dbn_pretrain(dims, data, epochs=0, learning_rate=0.3, rng=np.random.default_rng(9))
after = dbn_pretrain(dims, data, epochs=200, learning_rate=0.3, rng=np.random.default_rng(9))


def recon_error(model):
    probs = rbm_hidden_probs(model.layers[0], data)
    return float(np.mean((data - rbm_visible_probs(model.layers[0], probs)) ** 2))


print(f"layer-1 reconstruction error: {recon_error(before):.4f} at init, "
      f"{recon_error(after):.4f} after 200 CD-1 epochs")

flat2 = flatten_w2(after)
assert np.array_equal(flatten_w2(unflatten_w2(flat2, dims)), flat2)
print("DBN flatten round-trip exact")

# the greedy pretraining already separates the prototypes in feature space
top = protos
for layer in after.layers:
    top = rbm_hidden_probs(layer, top)
print(f"top-layer probabilities: A {np.round(top[0], 3).tolist()}, B {np.round(top[1], 3).tolist()}")

# pretraining leaves the logistic head at zero (the swarm optimizer owns
# it in the pipeline); hand-set one here to turn the features into scores
after.head_w = np.array([3.0, 3.0])
after.head_b = -3.0
print(f"forward score of prototype A with a hand-set head: {dbn_forward(after, protos[0]):.4f}")
print(f"forward score of prototype B with a hand-set head: {dbn_forward(after, protos[1]):.4f}")
