"""Sequence likelihood and the brute-force cross-checks.

The forward recursion sums over every hidden path in O(T N^2); the oracle
enumerates all N^T paths explicitly. On small models they must agree, and
the single best path can never be more likely than all paths together.
"""

import numpy as np

from attackhmm import (
    brute_force_decode,
    brute_force_likelihood,
    forward_likelihood,
    validate_model,
    viterbi_decode,
)

model = validate_model({
    "transition": [[0.5, 0.3, 0.2], [0.2, 0.6, 0.2], [0.1, 0.1, 0.8]],
    "emission": [[0.9, 0.1], [0.4, 0.6], [0.2, 0.8]],
    "initial": [0.6, 0.3, 0.1],
})
obs = [0, 1, 1]

lik = forward_likelihood(model, obs)
print("forward:     ", lik.probability)
print("enumerated:  ", brute_force_likelihood(model, obs))

best = viterbi_decode(model, obs)
print("viterbi path:", best.path, "p =", best.probability)
print("oracle path: ", brute_force_decode(model, obs).path)

# %% Long sequences: linear-scale probabilities underflow, logs do not.
long_obs = [0, 1] * 1000
lik = forward_likelihood(model, long_obs)
print(lik.probability, lik.log_probability)
print(viterbi_decode(model, long_obs).log_probability)

# %% A quick randomized comparison
rng = np.random.default_rng(0)
worst = 0.0
for _ in range(50):
    n, m, t = rng.integers(1, 6), rng.integers(1, 5), rng.integers(1, 7)
    raw = {
        "transition": rng.dirichlet(np.ones(n), size=n),
        "emission": rng.dirichlet(np.ones(m), size=n),
        "initial": rng.dirichlet(np.ones(n)),
    }
    mdl = validate_model(raw)
    y = list(rng.integers(0, m, size=t))
    exact = brute_force_likelihood(mdl, y)
    worst = max(worst, abs(forward_likelihood(mdl, y).probability - exact) / exact)
print(f"largest relative difference over 50 models: {worst:.2e}")
