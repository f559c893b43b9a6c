"""Command-line interface: ``attackhmm {validate,decode,evaluate,reproduce}``.

Exit status is 0 on success, 1 for a domain failure (invalid model,
impossible observation sequence, reproduction mismatch) and 2 for usage,
file and parse errors.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from . import attack, ingest
from .errors import (
    EmptyInput,
    EmptySequence,
    HmmError,
    ModelError,
    NoViablePath,
)
from .hmm import ObservationSequence, forward_likelihood, load_model, viterbi_decode
from .report import PredictionReport, render_reproduction, reproduce

EXIT_OK, EXIT_DOMAIN, EXIT_USAGE = 0, 1, 2

_DOMAIN_ERRORS = (ModelError, NoViablePath, EmptySequence, EmptyInput)


def _parse_obs(text, model):
    labels = [s for s in (p.strip() for p in text.split(",")) if s]
    return ObservationSequence(tuple(model.observation_index(s) for s in labels))


def cmd_validate(args, out):
    model = load_model(args.model)
    print(f"{args.model}: valid ({model.num_states} states, "
          f"{model.num_observations} observations)", file=out)
    return EXIT_OK


def cmd_decode(args, out):
    model = load_model(args.model)
    from_log = args.log is not None
    if from_log == (args.obs is not None):
        raise _Usage("decode needs exactly one of --obs or --log")
    if from_log:
        rules = ingest.load_rules(args.rules or attack.data_path(ingest.DEFAULT_RULES_FILE), model)
        obs = ingest.load_event_log(args.log, rules)
    else:
        obs = _parse_obs(args.obs, model)
    sigs = attack.load_signatures(args.signatures or attack.data_path(attack.SIGNATURES_FILE))
    result = viterbi_decode(model, obs)
    match = attack.match_attack_type(result.path, sigs)
    report = PredictionReport.build(model, obs, result, match, from_log=from_log)
    print(report.to_json() if args.json else report.render(), file=out)
    return EXIT_OK


def cmd_evaluate(args, out):
    if args.obs is None:
        raise _Usage("evaluate needs --obs")
    if args.per_model:
        paths = sorted(Path(args.per_model).glob("*.json"))
        if not paths:
            raise _Usage(f"no model files in {args.per_model}")
    else:
        paths = [Path(args.model)]

    rows = []
    for path in paths:
        model = load_model(path)
        lik = forward_likelihood(model, _parse_obs(args.obs, model))
        rows.append({"model": str(path), "likelihood": lik.probability,
                     "log_likelihood": lik.log_probability})
    rows.sort(key=lambda r: -r["log_likelihood"])
    for rank, row in enumerate(rows, 1):
        row["rank"] = rank

    if args.json:
        # -inf has no JSON literal; a zero likelihood reports its log as null
        clean = [dict(r, log_likelihood=None if r["likelihood"] == 0.0 else r["log_likelihood"])
                 for r in rows]
        print(json.dumps(clean if args.per_model else clean[0], indent=2), file=out)
    else:
        for row in rows:
            prefix = f"{row['rank']:>3}. " if args.per_model else ""
            print(f"{prefix}{row['model']}: P(Y|model) = {row['likelihood']:.6e}  "
                  f"log = {row['log_likelihood']:.6f}", file=out)
    return EXIT_OK


def cmd_reproduce(args, out):
    model = load_model(args.model)
    sigs = attack.load_signatures(args.signatures or attack.data_path(attack.SIGNATURES_FILE))
    rows = reproduce(model, sigs)
    if args.json:
        print(json.dumps([r.to_dict() for r in rows], indent=2), file=out)
    else:
        print(render_reproduction(model, rows), file=out)
    failed = [r.name for r in rows if not r.passed]
    if failed:
        print(f"reproduce: mismatch in row(s): {', '.join(failed)}", file=sys.stderr)
        return EXIT_DOMAIN
    return EXIT_OK


class _Usage(Exception):
    pass


def build_parser() -> argparse.ArgumentParser:
    default_model = str(attack.data_path(attack.MODEL_FILE))

    parser = argparse.ArgumentParser(
        prog="attackhmm", description="Decode attack paths from observation sequences."
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def add(name, func, help):
        p = sub.add_parser(name, help=help)
        p.add_argument("--model", default=default_model,
                       help="model JSON file (default: shipped Action Spoofing model)")
        p.add_argument("--json", action="store_true", help="machine-readable output")
        p.set_defaults(func=func)
        return p

    add("validate", cmd_validate, "check a model file")

    p = add("decode", cmd_decode, "decode the most likely attack path")
    p.add_argument("--obs", help="comma-separated observations, e.g. O1,O2,O3,O4 or 0,1,2,3")
    p.add_argument("--log", help="CSV event log to ingest instead of --obs")
    p.add_argument("--rules", help="rules JSON for --log (default: shipped ProcMon rules)")
    p.add_argument("--signatures", help="signatures JSON (default: shipped)")

    p = add("evaluate", cmd_evaluate, "likelihood of an observation sequence")
    p.add_argument("--obs", help="comma-separated observations")
    p.add_argument("--per-model", metavar="DIR", help="rank every model JSON in DIR")

    p = add("reproduce", cmd_reproduce, "decode every signature and check its path")
    p.add_argument("--signatures", help="signatures JSON (default: shipped)")
    return parser


def main(argv=None, out=None) -> int:
    out = out or sys.stdout
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args, out)
    except _DOMAIN_ERRORS as exc:
        print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_DOMAIN
    except (HmmError, _Usage) as exc:
        print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except OSError as exc:
        print(f"error: {exc.strerror or exc}: {exc.filename or ''}".rstrip(": "), file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
