"""Discrete hidden Markov models: representation, validation, decoding.

All arithmetic is done on natural logarithms. ``log(0)`` is ``-inf`` and
propagates through sums; no probability is ever clipped or smoothed.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path
from typing import Mapping, NamedTuple, Optional, Sequence, Union

import numpy as np
from scipy.special import logsumexp

from .errors import (
    DimensionMismatch,
    EmptyModel,
    EmptySequence,
    NegativeEntry,
    NoViablePath,
    NotStochastic,
    ParseError,
    SymbolOutOfRange,
)

#: Largest tolerated deviation of a probability row sum from 1.
STOCHASTIC_TOL = 1e-9


def _frozen(a) -> np.ndarray:
    a = np.array(a, dtype=float)
    a.flags.writeable = False
    return a


def _log(a: np.ndarray) -> np.ndarray:
    with np.errstate(divide="ignore"):
        out = np.log(a)
    out.flags.writeable = False
    return out


@dataclass(frozen=True, eq=False)
class HmmModel:
    """A validated discrete HMM ``(transition, emission, initial)``.

    Build instances through :func:`validate_model` or :func:`load_model`;
    the constructor itself does no checking. Arrays are read-only, so a
    model can be shared between threads.

    Attributes
    ----------
    transition : ndarray, shape (N, N)
        ``transition[i, j]`` is P(state j at t+1 | state i at t).
    emission : ndarray, shape (N, M)
        ``emission[i, k]`` is P(observation k | state i).
    initial : ndarray, shape (N,)
        Starting-state distribution.
    state_names, observation_names : tuple of str
    """

    transition: np.ndarray
    emission: np.ndarray
    initial: np.ndarray
    state_names: tuple
    observation_names: tuple
    log_transition: np.ndarray = field(init=False, repr=False)
    log_emission: np.ndarray = field(init=False, repr=False)
    log_initial: np.ndarray = field(init=False, repr=False)

    def __post_init__(self):
        for name in ("transition", "emission", "initial"):
            object.__setattr__(self, name, _frozen(getattr(self, name)))
        object.__setattr__(self, "state_names", tuple(self.state_names))
        object.__setattr__(self, "observation_names", tuple(self.observation_names))
        object.__setattr__(self, "log_transition", _log(self.transition))
        object.__setattr__(self, "log_emission", _log(self.emission))
        object.__setattr__(self, "log_initial", _log(self.initial))

    @property
    def num_states(self) -> int:
        return self.transition.shape[0]

    @property
    def num_observations(self) -> int:
        return self.emission.shape[1]

    def __eq__(self, other):
        if not isinstance(other, HmmModel):
            return NotImplemented
        return (
            self.state_names == other.state_names
            and self.observation_names == other.observation_names
            and np.array_equal(self.transition, other.transition)
            and np.array_equal(self.emission, other.emission)
            and np.array_equal(self.initial, other.initial)
        )

    __hash__ = None

    def to_dict(self) -> dict:
        """Plain-JSON form, the same schema :func:`validate_model` reads."""
        return {
            "state_names": list(self.state_names),
            "observation_names": list(self.observation_names),
            "initial": self.initial.tolist(),
            "transition": self.transition.tolist(),
            "emission": self.emission.tolist(),
        }

    def observation_index(self, label: Union[str, int]) -> int:
        """Resolve an observation given as an index, ``"O7"`` or its full name."""
        return _resolve(label, self.observation_names, "observation")

    def state_index(self, label: Union[str, int]) -> int:
        return _resolve(label, self.state_names, "state")


def _resolve(label, names, kind):
    if isinstance(label, (int, np.integer)):
        idx = int(label)
    else:
        text = str(label).strip()
        if text.lstrip("-").isdigit():
            idx = int(text)
        else:
            for i, name in enumerate(names):
                short = name.split(":", 1)[0].strip()
                if text == name or text.lower() == short.lower():
                    return i
            raise SymbolOutOfRange(f"unknown {kind} {text!r}")
    if not 0 <= idx < len(names):
        raise SymbolOutOfRange(f"{kind} index {idx} outside [0, {len(names)})")
    return idx


@dataclass(frozen=True)
class Provenance:
    """Where an observation came from: a source name and a 1-based line."""

    source: str
    line: int


@dataclass(frozen=True)
class ObservationSequence:
    """Observation symbol indices, optionally annotated with their origin.

    ``skipped`` counts input records that produced no symbol; it is only
    meaningful for sequences built by the log ingester.
    """

    symbols: tuple
    provenance: tuple = ()
    skipped: int = 0

    def __post_init__(self):
        object.__setattr__(self, "symbols", tuple(int(s) for s in self.symbols))
        object.__setattr__(self, "provenance", tuple(self.provenance))

    def __len__(self):
        return len(self.symbols)

    def __iter__(self):
        return iter(self.symbols)


@dataclass(frozen=True, eq=False)
class DecodeResult:
    """Most probable state path and its natural-log joint probability.

    ``backpointers[t, j]`` is the predecessor of state ``j`` at step ``t``
    on the best path into ``(t, j)``; row 0 is all zeros. Oracle results
    carry ``backpointers=None``.
    """

    path: tuple
    log_probability: float
    backpointers: Optional[np.ndarray] = None

    @property
    def probability(self) -> float:
        return float(np.exp(self.log_probability))

    def __eq__(self, other):
        if not isinstance(other, DecodeResult):
            return NotImplemented
        if (self.backpointers is None) != (other.backpointers is None):
            return False
        same_bp = self.backpointers is None or np.array_equal(
            self.backpointers, other.backpointers
        )
        return (
            self.path == other.path
            and self.log_probability == other.log_probability
            and same_bp
        )

    __hash__ = None


class Likelihood(NamedTuple):
    probability: float
    log_probability: float


ObsLike = Union[ObservationSequence, Sequence[int]]


# ---------------------------------------------------------------------------
# validation and I/O
# ---------------------------------------------------------------------------

def _as_array(raw, key, ndim):
    try:
        a = np.asarray(raw[key], dtype=float)
    except KeyError:
        raise DimensionMismatch(f"missing {key!r}") from None
    except (TypeError, ValueError) as exc:
        raise DimensionMismatch(f"{key!r} is not a numeric {ndim}-d array: {exc}") from None
    if a.ndim != ndim:
        raise DimensionMismatch(f"{key!r} must be {ndim}-dimensional, got shape {a.shape}")
    return a


def _check_probabilities(name, a):
    if not np.all(np.isfinite(a)):
        raise NotStochastic(name, None, float("nan"))
    neg = np.argwhere(a < 0)
    if neg.size:
        where = tuple(int(i) for i in neg[0])
        raise NegativeEntry(f"{name} entry {where} is negative ({a[where]!r})")
    sums = a.sum(axis=-1)
    if a.ndim == 1:
        if abs(sums - 1.0) > STOCHASTIC_TOL:
            raise NotStochastic(name, None, float(sums))
        return
    bad = np.flatnonzero(np.abs(sums - 1.0) > STOCHASTIC_TOL)
    if bad.size:
        raise NotStochastic(name, int(bad[0]), float(sums[bad[0]]))


def validate_model(raw: Mapping) -> HmmModel:
    """Check raw model data and return an immutable :class:`HmmModel`.

    ``raw`` uses the model-file keys: ``initial``, ``transition``,
    ``emission`` and optionally ``state_names`` / ``observation_names``
    (defaulting to ``S1..SN`` and ``O1..OM``). Rows are never renormalized.

    Raises
    ------
    EmptyModel
        N or M is zero.
    DimensionMismatch
        Shapes disagree with each other or with the name lists.
    NegativeEntry
        Any probability below zero.
    NotStochastic
        A row (or the initial vector) sums to something other than 1 by
        more than ``STOCHASTIC_TOL``; the offending row is reported.
    """
    trans = _as_array(raw, "transition", 2)
    emit = _as_array(raw, "emission", 2)
    init = _as_array(raw, "initial", 1)

    n = init.shape[0]
    if n == 0 or trans.size == 0 or emit.size == 0:
        raise EmptyModel("model needs at least one state and one observation")
    if trans.shape != (n, n):
        raise DimensionMismatch(f"transition has shape {trans.shape}, expected {(n, n)}")
    if emit.shape[0] != n:
        raise DimensionMismatch(f"emission has {emit.shape[0]} rows, expected {n}")
    m = emit.shape[1]

    state_names = raw.get("state_names")
    if state_names is None:
        state_names = [f"S{i + 1}" for i in range(n)]
    obs_names = raw.get("observation_names")
    if obs_names is None:
        obs_names = [f"O{k + 1}" for k in range(m)]
    if len(state_names) != n:
        raise DimensionMismatch(f"{len(state_names)} state names for {n} states")
    if len(obs_names) != m:
        raise DimensionMismatch(f"{len(obs_names)} observation names for {m} observations")

    _check_probabilities("initial", init)
    _check_probabilities("transition", trans)
    _check_probabilities("emission", emit)
    return HmmModel(trans, emit, init, tuple(map(str, state_names)), tuple(map(str, obs_names)))


def _reject_constant(name):
    raise ValueError(f"{name} is not allowed in model files")


def loads_model(text: str) -> HmmModel:
    """Parse and validate a model JSON document."""
    try:
        raw = json.loads(text, parse_constant=_reject_constant)
    except json.JSONDecodeError as exc:
        raise ParseError(exc.msg, exc.lineno, exc.colno) from None
    except ValueError as exc:
        raise ParseError(str(exc)) from None
    if not isinstance(raw, dict):
        raise ParseError("model file must contain a JSON object")
    for key in ("state_names", "observation_names", "initial", "transition", "emission"):
        if key not in raw:
            raise ParseError(f"model file is missing key {key!r}")
    return validate_model(raw)


def load_model(path) -> HmmModel:
    return loads_model(Path(path).read_text(encoding="utf-8"))


def dumps_model(model: HmmModel) -> str:
    """Model JSON with one matrix row per line."""
    d = model.to_dict()
    lines = ["{"]
    for key in ("state_names", "observation_names"):
        lines.append(f"  {json.dumps(key)}: [")
        lines.append(",\n".join(f"    {json.dumps(name)}" for name in d[key]))
        lines.append("  ],")
    lines.append(f'  "initial": {json.dumps(d["initial"])},')
    for key in ("transition", "emission"):
        lines.append(f"  {json.dumps(key)}: [")
        lines.append(",\n".join(f"    {json.dumps(row)}" for row in d[key]))
        lines.append("  ]" + ("," if key == "transition" else ""))
    lines.append("}")
    return "\n".join(lines) + "\n"


def dump_model(model: HmmModel, path) -> None:
    Path(path).write_text(dumps_model(model), encoding="utf-8")


# ---------------------------------------------------------------------------
# inference
# ---------------------------------------------------------------------------

def as_symbols(model: HmmModel, obs: ObsLike) -> np.ndarray:
    """Return ``obs`` as an int array after range-checking against ``model``."""
    symbols = obs.symbols if isinstance(obs, ObservationSequence) else tuple(obs)
    if len(symbols) == 0:
        raise EmptySequence("observation sequence is empty")
    out = np.empty(len(symbols), dtype=np.intp)
    m = model.num_observations
    for t, s in enumerate(symbols):
        if isinstance(s, (bool, np.bool_)) or not isinstance(s, (int, np.integer)):
            raise SymbolOutOfRange(f"symbol {s!r} at position {t} is not an integer index")
        if not 0 <= s < m:
            raise SymbolOutOfRange(f"symbol {s} at position {t} outside [0, {m})")
        out[t] = s
    return out


def viterbi_decode(model: HmmModel, obs: ObsLike) -> DecodeResult:
    """Most probable hidden-state path for ``obs``.

    Ties in every max are resolved toward the lowest state index, both when
    choosing a predecessor and when choosing the final state.

    Raises
    ------
    SymbolOutOfRange, EmptySequence
        Bad observation input.
    NoViablePath
        The sequence has probability zero under every state path.
    """
    y = as_symbols(model, obs)
    n, steps = model.num_states, len(y)
    log_a = model.log_transition
    log_b = model.log_emission

    psi = np.zeros((steps, n), dtype=np.intp)
    delta = model.log_initial + log_b[:, y[0]]
    for t in range(1, steps):
        # scores[i, j]: best path ending in i at t-1, then i -> j
        scores = delta[:, None] + log_a
        psi[t] = np.argmax(scores, axis=0)
        delta = scores[psi[t], np.arange(n)] + log_b[:, y[t]]

    last = int(np.argmax(delta))
    best = float(delta[last])
    if best == -np.inf:
        raise NoViablePath(
            "observation sequence has zero probability under every state path"
        )

    path = [last]
    for t in range(steps - 1, 0, -1):
        path.append(int(psi[t, path[-1]]))
    path.reverse()
    psi.flags.writeable = False
    return DecodeResult(tuple(path), best, psi)


def forward_likelihood(model: HmmModel, obs: ObsLike) -> Likelihood:
    """P(obs | model), summed over all state paths by the forward recursion."""
    y = as_symbols(model, obs)
    log_a = model.log_transition
    log_b = model.log_emission

    alpha = model.log_initial + log_b[:, y[0]]
    for t in range(1, len(y)):
        alpha = logsumexp(alpha[:, None] + log_a, axis=0) + log_b[:, y[t]]
    total = float(logsumexp(alpha))
    return Likelihood(float(np.exp(total)), total)
