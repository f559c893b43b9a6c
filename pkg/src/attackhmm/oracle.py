"""Exhaustive-enumeration oracles for decoding and likelihood.

These score every one of the N**T state paths independently and exist to
check the dynamic-programming routines in :mod:`attackhmm.hmm`. They are
exponential; :data:`MAX_PATHS` bounds the work.
"""

import itertools
import math

import numpy as np

from .errors import TooLarge
from .hmm import DecodeResult, HmmModel, ObsLike, as_symbols

MAX_PATHS = 10**7
_CHUNK = 1 << 16


def _guard(n, steps):
    if n**steps > MAX_PATHS:
        raise TooLarge(f"{n}**{steps} state paths exceeds the limit of {MAX_PATHS}")


def _paths_latest_first(n, steps):
    """Yield blocks of paths ordered so the *last* step varies slowest.

    Taking the first maximum in this order selects, among tied paths, the
    one with the lowest final state, then the lowest state before it, and
    so on: the same choice backtracking with lowest-index argmax makes.
    """
    it = itertools.product(range(n), repeat=steps)
    while True:
        block = list(itertools.islice(it, _CHUNK))
        if not block:
            return
        yield np.array(block, dtype=np.intp)[:, ::-1]


def path_log_probability(model: HmmModel, path, obs: ObsLike) -> float:
    """Natural-log joint probability of one state path and ``obs``."""
    y = as_symbols(model, obs)
    lp = model.log_initial[path[0]] + model.log_emission[path[0], y[0]]
    for t in range(1, len(y)):
        lp = lp + model.log_transition[path[t - 1], path[t]]
        lp = lp + model.log_emission[path[t], y[t]]
    return float(lp)


def brute_force_decode(model: HmmModel, obs: ObsLike) -> DecodeResult:
    """Best state path by scoring every path.

    Unlike :func:`~attackhmm.hmm.viterbi_decode` this does not raise when
    all paths are impossible: it returns the tie-break-first path with a
    log-probability of ``-inf``.
    """
    y = as_symbols(model, obs)
    n, steps = model.num_states, len(y)
    _guard(n, steps)
    log_a, log_b = model.log_transition, model.log_emission

    best_lp, best_path = None, None
    for paths in _paths_latest_first(n, steps):
        lp = model.log_initial[paths[:, 0]] + log_b[paths[:, 0], y[0]]
        for t in range(1, steps):
            lp = lp + log_a[paths[:, t - 1], paths[:, t]]
            lp = lp + log_b[paths[:, t], y[t]]
        k = int(np.argmax(lp))
        if best_lp is None or lp[k] > best_lp:
            best_lp, best_path = float(lp[k]), tuple(int(s) for s in paths[k])
    return DecodeResult(best_path, best_lp, None)


def brute_force_likelihood(model: HmmModel, obs: ObsLike) -> float:
    """P(obs | model) as an exact-summed total over all state paths."""
    y = as_symbols(model, obs)
    n, steps = model.num_states, len(y)
    _guard(n, steps)
    a, b, pi = model.transition, model.emission, model.initial

    terms = []
    for paths in _paths_latest_first(n, steps):
        p = pi[paths[:, 0]] * b[paths[:, 0], y[0]]
        for t in range(1, steps):
            p = p * a[paths[:, t - 1], paths[:, t]] * b[paths[:, t], y[t]]
        terms.extend(p.tolist())
    return math.fsum(terms)
