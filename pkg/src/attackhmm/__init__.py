"""Hidden Markov model decoding of multi-step attack paths."""

from .attack import (
    AttackMatch,
    AttackSignature,
    MatchKind,
    build_reference_model,
    lcs_length,
    load_signatures,
    match_attack_type,
    signatures,
)
from .errors import *  # noqa: F401,F403
from .hmm import (
    DecodeResult,
    HmmModel,
    Likelihood,
    ObservationSequence,
    Provenance,
    forward_likelihood,
    load_model,
    validate_model,
    viterbi_decode,
)
from .oracle import brute_force_decode, brute_force_likelihood

__version__ = "0.1.0"
