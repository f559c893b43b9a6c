"""Prediction reports and signature reproduction, as tables or JSON."""

from __future__ import annotations

import json
from dataclasses import dataclass
from typing import Optional

from .attack import AttackMatch, AttackSignature, MatchKind, match_attack_type
from .errors import NoViablePath
from .hmm import DecodeResult, HmmModel, ObservationSequence, viterbi_decode


def _short(name: str) -> str:
    return name.split(":", 1)[0].strip()


@dataclass(frozen=True)
class PredictionReport:
    observations: tuple  # (index, name) pairs
    path: tuple  # (index, name) pairs
    log_probability: float
    match: AttackMatch
    backpointers: tuple  # T rows of N predecessor indices
    skipped: Optional[int] = None
    source_lines: tuple = ()

    @classmethod
    def build(cls, model: HmmModel, obs: ObservationSequence, result: DecodeResult,
              match: AttackMatch, from_log: bool = False):
        return cls(
            observations=tuple((s, model.observation_names[s]) for s in obs.symbols),
            path=tuple((s, model.state_names[s]) for s in result.path),
            log_probability=result.log_probability,
            match=match,
            backpointers=tuple(tuple(int(v) for v in row) for row in result.backpointers),
            skipped=obs.skipped if from_log else None,
            source_lines=tuple(p.line for p in obs.provenance),
        )

    def to_dict(self) -> dict:
        return {
            "observations": [{"index": i, "name": n} for i, n in self.observations],
            "path": [{"index": i, "name": n} for i, n in self.path],
            "log_probability": self.log_probability,
            "match": self.match.to_dict(),
            "backpointers": [list(row) for row in self.backpointers],
            "skipped": self.skipped,
            "source_lines": list(self.source_lines),
        }

    @classmethod
    def from_dict(cls, d: dict):
        return cls(
            observations=tuple((o["index"], o["name"]) for o in d["observations"]),
            path=tuple((s["index"], s["name"]) for s in d["path"]),
            log_probability=d["log_probability"],
            match=AttackMatch.from_dict(d["match"]),
            backpointers=tuple(tuple(row) for row in d["backpointers"]),
            skipped=d.get("skipped"),
            source_lines=tuple(d.get("source_lines", ())),
        )

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2)

    @classmethod
    def from_json(cls, text: str):
        return cls.from_dict(json.loads(text))

    def render(self) -> str:
        lines = [
            "Observation sequence: " + " -> ".join(_short(n) for _, n in self.observations),
            "Attack path:          " + " -> ".join(_short(n) for _, n in self.path),
            f"log P*:               {self.log_probability:.6f}",
        ]
        m = self.match
        if m.match_kind is MatchKind.NO_MATCH:
            lines.append(f"Attack type:          no match (best similarity {m.similarity:.3f})")
        else:
            lines.append(f"Attack type:          {m.matched_type} ({m.match_kind.value}, "
                         f"similarity {m.similarity:.3f})")
        if self.skipped is not None:
            lines.append(f"Skipped log records:  {self.skipped}")

        lines += ["", "step  observation  state  from"]
        for t, ((_, oname), (_, sname)) in enumerate(zip(self.observations, self.path)):
            if t == 0:
                prev = "start"
            else:
                prev = _short(self.path[t - 1][1])
            src = f"  (line {self.source_lines[t]})" if self.source_lines else ""
            lines.append(f"{t + 1:>4}  {_short(oname):<11}  {_short(sname):<5}  {prev}{src}")
        return "\n".join(lines)


@dataclass(frozen=True)
class ReproRow:
    name: str
    observations: tuple
    expected_path: tuple
    decoded_path: Optional[tuple]
    match: Optional[AttackMatch]
    error: Optional[str] = None

    @property
    def passed(self) -> bool:
        return (
            self.decoded_path == self.expected_path
            and self.match is not None
            and self.match.match_kind is MatchKind.EXACT
            and self.match.matched_type == self.name
        )

    def to_dict(self):
        return {
            "name": self.name,
            "observations": list(self.observations),
            "expected_path": list(self.expected_path),
            "decoded_path": None if self.decoded_path is None else list(self.decoded_path),
            "match": None if self.match is None else self.match.to_dict(),
            "error": self.error,
            "passed": self.passed,
        }


def reproduce(model: HmmModel, sigs) -> list:
    """Decode every signature's observations and compare with its path."""
    rows = []
    for sig in sigs:
        sig: AttackSignature
        try:
            result = viterbi_decode(model, sig.canonical_observations)
        except NoViablePath as exc:
            rows.append(ReproRow(sig.name, sig.canonical_observations, sig.canonical_path,
                                 None, None, str(exc)))
            continue
        match = match_attack_type(result.path, sigs)
        rows.append(ReproRow(sig.name, sig.canonical_observations, sig.canonical_path,
                             result.path, match))
    return rows


def render_reproduction(model: HmmModel, rows) -> str:
    def obs(seq):
        return " -> ".join(_short(model.observation_names[o]) for o in seq)

    def states(seq):
        return "-" if seq is None else " -> ".join(_short(model.state_names[s]) for s in seq)

    table = [("Observation Sequence", "Attack Path Generated", "Attack Type", "Result")]
    for r in rows:
        verdict = "PASS" if r.passed else "FAIL"
        kind = r.match.matched_type if r.match and r.match.matched_type else "-"
        table.append((obs(r.observations), states(r.decoded_path), kind, verdict))
    widths = [max(len(row[c]) for row in table) for c in range(4)]
    out = []
    for i, row in enumerate(table):
        out.append("  ".join(cell.ljust(w) for cell, w in zip(row, widths)).rstrip())
        if i == 0:
            out.append("  ".join("-" * w for w in widths))
    return "\n".join(out)
