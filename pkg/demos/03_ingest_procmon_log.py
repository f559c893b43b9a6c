"""From an exported ProcMon log to an attack verdict.

Keyword rules map individual log records to observation symbols. The log
used here records a dropper creating 360ubcw.exe, a visit to the bank's
site, a phishing link opened from Outlook, a click on an invisible overlay
and finally a transfer request.
"""

from pathlib import Path

from attackhmm import build_reference_model, match_attack_type, signatures, viterbi_decode
from attackhmm.attack import data_path
from attackhmm.ingest import DEFAULT_RULES_FILE, load_event_log, load_rules

HERE = Path(__file__).resolve().parent
LOG = HERE.parent / "tests" / "fixtures" / "procmon_clickjacking.csv"

model = build_reference_model()
rules = load_rules(data_path(DEFAULT_RULES_FILE), model)
for rule in list(rules)[:3]:
    print(rule)

seq = load_event_log(LOG, rules)
for sym, prov in zip(seq.symbols, seq.provenance):
    print(f"line {prov.line:>3}: {model.observation_names[sym]}")
print("records skipped:", seq.skipped)

# %% Decode and classify
result = viterbi_decode(model, seq)
print(" -> ".join(model.state_names[s] for s in result.path))

# The malware is resident (S1) while the user logs in, so the decoded path
# has an extra S1 and only approximately matches a signature.
print(match_attack_type(result.path, signatures()))
