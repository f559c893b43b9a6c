import csv
import io
import json
import warnings

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from attackhmm import build_reference_model
from attackhmm.attack import data_path
from attackhmm.errors import (
    CsvMalformed,
    EmptyRuleSet,
    MissingColumn,
    ParseError,
    UnknownObservation,
)
from attackhmm.ingest import (
    DEFAULT_RULES_FILE,
    MESSAGE_TRACKING_COLUMNS,
    MESSAGE_TRACKING_RULES_FILE,
    PROCMON_COLUMNS,
    DuplicateRuleWarning,
    compile_rules,
    load_event_log,
    load_rules,
    parse_event_log,
)

MODEL = build_reference_model()
HEADER = '"Time of Day","Process Name","PID","Operation","Path","Result","Detail"\n'


def record(path="", detail="", process="x.exe", operation="CreateFile"):
    buf = io.StringIO()
    csv.writer(buf, lineterminator="\n").writerow(
        ["10:00:00 AM", process, "1", operation, path, "SUCCESS", detail])
    return buf.getvalue()


@pytest.fixture(scope="module")
def default_rules():
    return load_rules(data_path(DEFAULT_RULES_FILE), MODEL)


# -- rule compilation -------------------------------------------------------

def test_empty_rule_list():
    with pytest.raises(EmptyRuleSet):
        compile_rules("[]", MODEL)


def test_observation_out_of_range():
    with pytest.raises(UnknownObservation):
        compile_rules('[{"observation": 99, "all_of": ["x"]}]', MODEL)


def test_shipped_default_rules(default_rules):
    assert len(default_rules) == 13
    assert {r.observation_index for r in default_rules} == set(range(13))
    assert default_rules.columns() <= set(PROCMON_COLUMNS)


def test_shipped_message_tracking_rules():
    rules = load_rules(data_path(MESSAGE_TRACKING_RULES_FILE), MODEL)
    assert rules.columns() <= set(MESSAGE_TRACKING_COLUMNS)


def test_parse_error_position():
    with pytest.raises(ParseError) as info:
        compile_rules('[\n  {"observation": 1,\n   "all_of": ["x"]\n', MODEL)
    assert info.value.line is not None and info.value.column is not None


@pytest.mark.parametrize("text", [
    '{"observation": 1}',
    '[{"all_of": ["x"]}]',
    '[{"observation": "O1", "all_of": ["x"]}]',
    '[{"observation": true, "all_of": ["x"]}]',
    '[{"observation": 1, "all_of": []}]',
    '[{"observation": 1, "all_of": [""]}]',
    '[{"observation": 1, "all_of": "x"}]',
    '[{"observation": 1, "all_of": ["x"], "fields": "Path"}]',
])
def test_malformed_rules(text):
    with pytest.raises(ParseError):
        compile_rules(text, MODEL)


def test_duplicate_rule_warns():
    text = json.dumps([{"observation": 1, "all_of": ["A"]}, {"observation": 1, "all_of": ["a"]}])
    with pytest.warns(DuplicateRuleWarning):
        rules = compile_rules(text, MODEL)
    assert len(rules) == 2


# -- parsing ----------------------------------------------------------------

def test_header_only(default_rules):
    seq = parse_event_log(HEADER, default_rules)
    assert seq.symbols == () and seq.skipped == 0


def test_malware_file_creation():
    rules = compile_rules('[{"observation": 6, "all_of": ["360ubcw.exe"], "fields": ["Path"]}]', MODEL)
    text = HEADER + record(path=r"C:\Users\v\AppData\Local\Temp\360UBCW.EXE")
    seq = parse_event_log(text, rules)
    assert seq.symbols == (6,)
    assert seq.provenance[0].line == 2


def test_consecutive_duplicates_collapse(default_rules):
    bank = record(path="victim:5023 -> secure.bankofamerica.com:https", operation="TCP Connect")
    text = HEADER + bank * 3
    seq = parse_event_log(text, default_rules, source="log.csv")
    assert seq.symbols == (0,)
    assert [(p.source, p.line) for p in seq.provenance] == [("log.csv", 2)]
    assert seq.skipped == 0


def test_first_match_wins(default_rules):
    # mentions the bank domain (O1 rule) and a transfer (O4 rule listed first)
    text = HEADER + record(path="secure.bankofamerica.com", detail="POST /transfer")
    assert parse_event_log(text, default_rules).symbols == (3,)


def test_fields_restrict_search(default_rules):
    # the O7 rule only searches Path
    text = HEADER + record(detail="360ubcw.exe")
    seq = parse_event_log(text, default_rules)
    assert seq.symbols == () and seq.skipped == 1


def test_no_cross_field_matches():
    rules = compile_rules('[{"observation": 0, "all_of": ["ab"], "fields": ["Path", "Detail"]}]', MODEL)
    assert parse_event_log(HEADER + record(path="a", detail="b"), rules).symbols == ()


def test_rule_without_fields_searches_everything():
    rules = compile_rules('[{"observation": 2, "all_of": ["needle"]}]', MODEL)
    assert parse_event_log(HEADER + record(process="needle.exe"), rules).symbols == (2,)


def test_missing_column(default_rules):
    with pytest.raises(MissingColumn):
        parse_event_log('"Process Name","Path"\n"a","b"\n', default_rules)


def test_wrong_field_count(default_rules):
    with pytest.raises(CsvMalformed) as info:
        parse_event_log(HEADER + record() + '"a","b"\n', default_rules)
    assert info.value.line == 3


def test_bad_quoting(default_rules):
    with pytest.raises(CsvMalformed):
        parse_event_log(HEADER + '"a"x,"b","c","d","e","f","g"\n', default_rules)


def test_no_header(default_rules):
    with pytest.raises(CsvMalformed):
        parse_event_log("", default_rules)


def test_multiline_record_line_numbers():
    rules = compile_rules('[{"observation": 5, "all_of": ["toast"]}]', MODEL)
    text = HEADER + record(detail="line one\nline two") + record(detail="toast tap")
    seq = parse_event_log(text, rules)
    assert seq.provenance[0].line == 4
    assert seq.skipped == 1


def test_message_tracking_export():
    rules = load_rules(data_path(MESSAGE_TRACKING_RULES_FILE), MODEL)
    text = (
        "EventId,Sender,Recipients,MessageSubject\n"
        "RECEIVE,promo@gift.example,victim@corp.example,Claim free gift!\n"
        "DELIVER,promo@gift.example,victim@corp.example,Claim free gift!\n"
        "DELIVER,boss@corp.example,victim@corp.example,Quarterly report\n"
    )
    seq = parse_event_log(text, rules)
    assert seq.symbols == (1,) and seq.skipped == 2


def test_procmon_fixture(default_rules, fixtures_dir):
    seq = load_event_log(fixtures_dir / "procmon_clickjacking.csv", default_rules)
    assert seq.symbols == (6, 0, 1, 2, 3)
    assert [p.line for p in seq.provenance] == [3, 6, 8, 9, 10]
    assert seq.skipped == 3


# -- properties -------------------------------------------------------------

TOKEN_RULES = compile_rules(
    json.dumps([{"observation": k, "all_of": [f"<obs {k}>"], "fields": ["Detail"]} for k in range(13)]),
    MODEL,
)

events = st.lists(st.one_of(st.integers(0, 12), st.none()), max_size=30)


def serialize(items):
    return HEADER + "".join(record(detail="noise" if k is None else f"<obs {k}>") for k in items)


@settings(max_examples=200, deadline=None)
@given(events)
def test_output_bounds(items):
    seq = parse_event_log(serialize(items), TOKEN_RULES)
    assert len(seq) <= len(items)
    assert all(0 <= s < 13 for s in seq.symbols)
    assert seq.skipped == items.count(None)
    assert all(a != b for a, b in zip(seq.symbols, seq.symbols[1:]))


@settings(max_examples=200, deadline=None)
@given(events)
def test_parsing_is_idempotent(items):
    first = parse_event_log(serialize(items), TOKEN_RULES)
    second = parse_event_log(serialize(list(first.symbols)), TOKEN_RULES)
    assert second.symbols == first.symbols
    assert parse_event_log(serialize(items), TOKEN_RULES) == first


@settings(max_examples=200, deadline=None)
@given(events, events)
def test_concatenation(a, b):
    sa = parse_event_log(serialize(a), TOKEN_RULES).symbols
    sb = parse_event_log(serialize(b), TOKEN_RULES).symbols
    joined = parse_event_log(serialize(a + b), TOKEN_RULES).symbols
    if sa and sb and sa[-1] == sb[0]:
        assert joined == sa + sb[1:]
    else:
        assert joined == sa + sb
