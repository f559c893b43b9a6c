"""Turn exported event logs into observation sequences.

A rules file is a JSON array of objects::

    {"observation": 6, "all_of": ["360ubcw.exe"], "fields": ["Path"]}

Each CSV record is tested against the rules in order. The first rule whose
``all_of`` substrings all occur (case-insensitively) in the record's
``fields`` emits its observation index. Omitting ``fields`` searches every
column. Records matching no rule are skipped and counted, and runs of the
same observation collapse to one symbol.
"""

from __future__ import annotations

import csv
import io
import json
import warnings
from dataclasses import dataclass
from pathlib import Path
from typing import Optional

from .errors import CsvMalformed, EmptyRuleSet, MissingColumn, ParseError, UnknownObservation
from .hmm import HmmModel, ObservationSequence, Provenance

DEFAULT_RULES_FILE = "procmon_rules.json"
MESSAGE_TRACKING_RULES_FILE = "message_tracking_rules.json"

PROCMON_COLUMNS = ("Time of Day", "Process Name", "PID", "Operation", "Path", "Result", "Detail")
MESSAGE_TRACKING_COLUMNS = ("EventId", "Sender", "Recipients", "MessageSubject")

# keeps substrings from matching across a field boundary
_FIELD_SEP = "\x1f"


class DuplicateRuleWarning(UserWarning):
    pass


@dataclass(frozen=True)
class Rule:
    observation_index: int
    all_of: tuple
    fields_searched: Optional[tuple] = None

    def to_dict(self):
        d = {"observation": self.observation_index, "all_of": list(self.all_of)}
        if self.fields_searched is not None:
            d["fields"] = list(self.fields_searched)
        return d


@dataclass(frozen=True)
class RuleSet:
    rules: tuple
    num_observations: int

    def __len__(self):
        return len(self.rules)

    def __iter__(self):
        return iter(self.rules)

    def columns(self) -> set:
        out = set()
        for rule in self.rules:
            out.update(rule.fields_searched or ())
        return out


def _string_list(value, what, i):
    if not isinstance(value, list) or not all(isinstance(v, str) for v in value):
        raise ParseError(f"rule #{i}: {what} must be a list of strings")
    return tuple(value)


def compile_rules(text: str, model: HmmModel) -> RuleSet:
    """Parse a rules JSON document and check it against ``model``.

    Raises
    ------
    ParseError
        Malformed JSON (with line and column) or a rule of the wrong shape.
    UnknownObservation
        A rule names an observation index outside the model's alphabet.
    EmptyRuleSet
        The document is an empty array.
    """
    try:
        raw = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ParseError(exc.msg, exc.lineno, exc.colno) from None
    if not isinstance(raw, list):
        raise ParseError("rules file must contain a JSON array")
    if not raw:
        raise EmptyRuleSet("rules file defines no rules")

    m = model.num_observations
    rules = []
    seen = set()
    for i, item in enumerate(raw):
        if not isinstance(item, dict) or "observation" not in item or "all_of" not in item:
            raise ParseError(f"rule #{i} must be an object with 'observation' and 'all_of'")
        obs = item["observation"]
        if isinstance(obs, bool) or not isinstance(obs, int):
            raise ParseError(f"rule #{i}: observation must be an integer index")
        if not 0 <= obs < m:
            raise UnknownObservation(f"rule #{i}: observation {obs} outside [0, {m})")
        all_of = _string_list(item["all_of"], "all_of", i)
        if not all_of or not all(all_of):
            raise ParseError(f"rule #{i}: all_of needs at least one non-empty string")
        fields = item.get("fields")
        if fields is not None:
            fields = _string_list(fields, "fields", i)
        rule = Rule(obs, tuple(s.casefold() for s in all_of), fields)
        if rule in seen:
            warnings.warn(f"rule #{i} duplicates an earlier rule", DuplicateRuleWarning, stacklevel=2)
        seen.add(rule)
        rules.append(rule)
    return RuleSet(tuple(rules), m)


def load_rules(path, model: HmmModel) -> RuleSet:
    return compile_rules(Path(path).read_text(encoding="utf-8"), model)


def _records(text):
    """Yield ``(first_line, row)`` for each CSV record after the header."""
    reader = csv.reader(io.StringIO(text, newline=""), strict=True)
    try:
        header = next(reader, None)
        if header is None:
            return
        prev_end = reader.line_num
        yield 1, header
        for row in reader:
            yield prev_end + 1, row
            prev_end = reader.line_num
    except csv.Error as exc:
        raise CsvMalformed(str(exc), reader.line_num) from None


def parse_event_log(text: str, rules: RuleSet, source: str = "<log>") -> ObservationSequence:
    """Map CSV log records to an :class:`ObservationSequence`.

    ``provenance`` holds one entry per emitted symbol, pointing at the first
    line of the record that produced it.

    Raises
    ------
    CsvMalformed
        No header, a record with the wrong number of fields, or bad quoting.
    MissingColumn
        A rule searches a column the header does not define.
    """
    records = _records(text.lstrip("\ufeff"))
    try:
        _, header = next(records)
    except StopIteration:
        raise CsvMalformed("log has no header row", 1) from None
    header = [h.strip() for h in header]
    col = {name: i for i, name in enumerate(header)}
    missing = sorted(rules.columns() - col.keys())
    if missing:
        raise MissingColumn(f"{source}: rules reference absent column(s) {missing}")

    compiled = [
        (r.observation_index, r.all_of,
         list(range(len(header))) if r.fields_searched is None else [col[f] for f in r.fields_searched])
        for r in rules
    ]

    symbols, provenance, skipped = [], [], 0
    for line, row in records:
        if not row:
            continue
        if len(row) != len(header):
            raise CsvMalformed(f"{source}: expected {len(header)} fields, got {len(row)}", line)
        for obs, needles, idx in compiled:
            haystack = _FIELD_SEP.join(row[k] for k in idx).casefold()
            if all(n in haystack for n in needles):
                if not symbols or symbols[-1] != obs:
                    symbols.append(obs)
                    provenance.append(Provenance(source, line))
                break
        else:
            skipped += 1
    return ObservationSequence(tuple(symbols), tuple(provenance), skipped)


def load_event_log(path, rules: RuleSet) -> ObservationSequence:
    path = Path(path)
    return parse_event_log(path.read_text(encoding="utf-8"), rules, source=str(path))
