"""Decoding attack paths with the Action Spoofing model.

Each attack type in the family has a characteristic sequence of things the
victim sees. Feeding those sequences to the Viterbi decoder recovers the
hidden attack stages, which are then matched against the known signatures.
"""

import numpy as np

from attackhmm import build_reference_model, match_attack_type, signatures, viterbi_decode

model = build_reference_model()
print(f"{model.num_states} hidden states, {model.num_observations} observation symbols")

# The model favours S1 (malware already installed) as the starting state,
# and S1 is equally likely to be followed by any of S2..S6.
print("initial:", np.round(model.initial, 3))
print("S1 row: ", np.round(model.transition[0], 3))

# %% Decode one sequence by hand
obs = [model.observation_index(o) for o in ("O1", "O5", "O6", "O4")]
result = viterbi_decode(model, obs)
print([model.state_names[s] for s in result.path])
print("log P* =", result.log_probability)

# The backpointer table explains each step: row t holds, for every state,
# the best predecessor at t - 1.
print(result.backpointers)

# %% All five signatures
for sig in signatures():
    r = viterbi_decode(model, sig.canonical_observations)
    m = match_attack_type(r.path, signatures())
    label = " -> ".join(model.state_names[s].split(":")[0] for s in r.path)
    print(f"{sig.name:<20} {label:<36} {m.matched_type} ({m.match_kind.value})")

# %% A path that matches nothing exactly
partial = [0, 3, 8, 10]  # S1 -> S4 -> S9 -> S11, skipping S10
print(match_attack_type(partial, signatures()))
