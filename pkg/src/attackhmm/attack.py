"""The Action Spoofing attack family: reference model, signatures, matching.

State and observation indices are zero-based throughout, so ``S1`` is
state 0 and ``O13`` is observation 12.
"""

from __future__ import annotations

import enum
import json
from dataclasses import dataclass
from importlib import resources
from pathlib import Path
from typing import Optional, Sequence

from .errors import EmptyInput, EmptySignatureSet, ParseError
from .hmm import HmmModel, validate_model

STATE_NAMES = (
    "S1: Installed malicious s/w",
    "S2: Flash App Overlay",
    "S3: URL scheme registering",
    "S4: Implicit intent interception",
    "S5: Query legit task list",
    "S6: Toast Window overlay",
    "S7: Message interception",
    "S8: Launches new task",
    "S9: Mimics trusted UI",
    "S10: User tricked",
    "S11: Sensitive data obtained",
)

OBSERVATION_NAMES = (
    "O1: User logged in",
    "O2: Receives email link (Malicious)",
    "O3: Visits Web pages; clicks on overlay button",
    "O4: Unauthorized account transaction",
    "O5: opens malicious app",
    "O6: Toast window pops up; taps on button",
    "O7: Malicious App running in background",
    "O8: Clicks on unregistered URL for uninstalled Bank App",
    "O9: Sign-In look-alike page open on foreground",
    "O10: Enters card details",
    "O11: Launches new Bank App task",
    "O12: Launches legit charity App",
    "O13: Selects Bank App from options",
)

#: Similarity a non-exact path needs to be reported as a nearest match.
MATCH_THRESHOLD = 0.5

MODEL_FILE = "action_spoofing.json"
SIGNATURES_FILE = "signatures.json"


def _reference_parameters():
    n, m = len(STATE_NAMES), len(OBSERVATION_NAMES)

    initial = [0.05] * n
    initial[0] = 0.5

    # Successor lists; each row is spread uniformly over its successors
    # except S1, which keeps a small self-loop (the malware stays resident
    # while the user acts) and splits the rest evenly over S2..S6.
    successors = {1: [9], 2: [6], 3: [8], 4: [7], 5: [9], 6: [8], 7: [8], 8: [9], 9: [10], 10: [10]}
    transition = [[0.0] * n for _ in range(n)]
    transition[0][0] = 0.1
    for j in range(1, 6):
        transition[0][j] = 0.18
    for i, succ in successors.items():
        for j in succ:
            transition[i][j] = 1.0 / len(succ)

    emits = {
        0: [0, 6],
        1: [1],
        2: [7],
        3: [11],
        4: [10],
        5: [4],
        6: [8],
        7: [8],
        8: [0, 12],
        9: [2, 5, 9],
        10: [3],
    }
    emission = [[0.0] * m for _ in range(n)]
    for i, ks in emits.items():
        for k in ks:
            emission[i][k] = 1.0 / len(ks)

    return {
        "state_names": list(STATE_NAMES),
        "observation_names": list(OBSERVATION_NAMES),
        "initial": initial,
        "transition": transition,
        "emission": emission,
    }


def build_reference_model() -> HmmModel:
    """The 11-state, 13-observation Action Spoofing model.

    S1 has the largest starting probability and moves to each of S2..S6
    with equal probability. Emission support is limited to the
    state/observation pairings seen in the five attack signatures.
    """
    return validate_model(_reference_parameters())


class MatchKind(str, enum.Enum):
    EXACT = "Exact"
    NEAREST = "Nearest"
    NO_MATCH = "NoMatch"


@dataclass(frozen=True)
class AttackSignature:
    """A named attack type with its canonical state path and observations."""

    name: str
    canonical_path: tuple
    canonical_observations: tuple

    def __post_init__(self):
        object.__setattr__(self, "canonical_path", tuple(int(s) for s in self.canonical_path))
        object.__setattr__(
            self, "canonical_observations", tuple(int(o) for o in self.canonical_observations)
        )
        if not self.canonical_path:
            raise ValueError(f"signature {self.name!r} has an empty path")
        if len(self.canonical_path) != len(self.canonical_observations):
            raise ValueError(
                f"signature {self.name!r}: {len(self.canonical_path)} states but "
                f"{len(self.canonical_observations)} observations"
            )

    def to_dict(self):
        return {
            "name": self.name,
            "path": list(self.canonical_path),
            "observations": list(self.canonical_observations),
        }


@dataclass(frozen=True)
class AttackMatch:
    matched_type: Optional[str]
    similarity: float
    match_kind: MatchKind

    def to_dict(self):
        return {
            "matched_type": self.matched_type,
            "similarity": self.similarity,
            "match_kind": self.match_kind.value,
        }

    @classmethod
    def from_dict(cls, d):
        return cls(d["matched_type"], d["similarity"], MatchKind(d["match_kind"]))


def _sig(name, states, observations):
    return AttackSignature(name, [s - 1 for s in states], [o - 1 for o in observations])


_SIGNATURES = (
    _sig("Clickjacking", [1, 2, 10, 11], [1, 2, 3, 4]),
    _sig("Tapjacking", [1, 6, 10, 11], [1, 5, 6, 4]),
    _sig("Scheme Squatting", [1, 3, 7, 9, 10, 11], [7, 8, 9, 1, 10, 4]),
    _sig("Task Impersonation", [1, 5, 8, 9, 10, 11], [7, 11, 9, 1, 10, 4]),
    _sig("Activity Hijack", [1, 4, 9, 10, 11], [7, 12, 13, 10, 4]),
)


def signatures() -> list:
    """The five Action Spoofing signatures, in reference-table order."""
    return list(_SIGNATURES)


def lcs_length(a: Sequence, b: Sequence) -> int:
    """Length of the longest common subsequence of ``a`` and ``b``."""
    if len(b) > len(a):
        a, b = b, a
    prev = [0] * (len(b) + 1)
    for x in a:
        cur = [0]
        for j, y in enumerate(b):
            cur.append(prev[j] + 1 if x == y else max(prev[j + 1], cur[j]))
        prev = cur
    return prev[-1]


def match_attack_type(path: Sequence[int], sigs: Sequence[AttackSignature]) -> AttackMatch:
    """Classify a decoded state path against attack signatures.

    An identical canonical path is an exact match. Otherwise each signature
    is scored by ``lcs_length(path, canonical) / max(len(path), len(canonical))``
    and the best score wins if it reaches :data:`MATCH_THRESHOLD`; earlier
    signatures win ties.
    """
    path = tuple(int(s) for s in path)
    if not path:
        raise EmptyInput("cannot match an empty path")
    if not sigs:
        raise EmptyInput("no signatures to match against")

    for sig in sigs:
        if sig.canonical_path == path:
            return AttackMatch(sig.name, 1.0, MatchKind.EXACT)

    best_sig, best = None, -1.0
    for sig in sigs:
        canon = sig.canonical_path
        score = lcs_length(path, canon) / max(len(path), len(canon))
        if score > best:
            best_sig, best = sig, score
    if best >= MATCH_THRESHOLD:
        return AttackMatch(best_sig.name, best, MatchKind.NEAREST)
    return AttackMatch(None, best, MatchKind.NO_MATCH)


# ---------------------------------------------------------------------------
# signature files and shipped data
# ---------------------------------------------------------------------------

def loads_signatures(text: str) -> list:
    try:
        raw = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ParseError(exc.msg, exc.lineno, exc.colno) from None
    if not isinstance(raw, list):
        raise ParseError("signatures file must contain a JSON array")
    if not raw:
        raise EmptySignatureSet("signatures file contains no signatures")
    sigs = []
    for i, item in enumerate(raw):
        try:
            sigs.append(AttackSignature(item["name"], item["path"], item["observations"]))
        except (KeyError, TypeError, ValueError) as exc:
            raise ParseError(f"signature #{i}: {exc}") from None
    return sigs


def load_signatures(path) -> list:
    return loads_signatures(Path(path).read_text(encoding="utf-8"))


def data_path(name: str) -> Path:
    """Filesystem path of a file shipped in the package's ``models`` directory."""
    return Path(str(resources.files("attackhmm") / "models" / name))
