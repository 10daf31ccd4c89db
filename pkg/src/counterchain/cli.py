"""Command-line front end: synth, verify, realize, eval, stats.

Configuration lives in a flat ``key = value`` text file; command-line flags
override file values, and the effective configuration digest is embedded in
every output header. Exit codes: 0 success, 1 verification or lint failure,
2 usage error, 3 generation exhaustion.
"""

from __future__ import annotations

import argparse
import hashlib
import json
import sys
from typing import Optional

from .dataset import (
    CorpusConfig,
    CorpusExhausted,
    DEFAULT_ERROR_WEIGHTS,
    SchemaMismatchError,
    MalformedRecordError,
    generate_corpus,
    label_steps,
    read_corpus,
    serialize_instance,
)
from .evaluation import (
    evaluate_instances,
    evaluate_pools,
    evaluate_scored_records,
    load_pools,
    load_scored_records,
    make_judge,
)
from .injection import ErrorType, verify_first_error
from .logic import RuleTemplate
from .realize import leak_lint, realized
from .synthesis import SynthesisConfig, verify_chain

EXIT_OK = 0
EXIT_FAILED = 1
EXIT_USAGE = 2
EXIT_EXHAUSTED = 3


def parse_kv_file(path: str) -> dict[str, str]:
    """Flat config format: one ``key = value`` per line, ``#`` comments."""
    out: dict[str, str] = {}
    with open(path, "r", encoding="utf-8") as fh:
        for number, raw in enumerate(fh, start=1):
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            if "=" not in line:
                raise ValueError(f"{path}:{number}: expected 'key = value'")
            key, value = line.split("=", 1)
            out[key.strip()] = value.strip()
    return out


def _flags_digest(*parts) -> str:
    return hashlib.sha256(repr(parts).encode()).hexdigest()[:16]


def _as_bool(text: str) -> bool:
    lowered = text.lower()
    if lowered in ("1", "true", "yes", "on"):
        return True
    if lowered in ("0", "false", "no", "off"):
        return False
    raise ValueError(f"not a boolean: {text!r}")


def _weights_from_kv(kv: dict[str, str]) -> tuple[tuple[ErrorType, float], ...]:
    by_type = dict(DEFAULT_ERROR_WEIGHTS)
    for key, value in kv.items():
        name = key.removeprefix("weight.")
        try:
            etype = ErrorType(name)
        except ValueError:
            continue
        by_type[etype] = float(value)
    return tuple(by_type.items())


def _synthesis_from_kv(kv: dict[str, str]) -> SynthesisConfig:
    base = SynthesisConfig()
    templates = dict(base.template_weights)
    for key, value in kv.items():
        name = key.removeprefix("template_weight.")
        if name != key:
            templates[RuleTemplate(name)] = float(value)

    def get(key: str, cast, default):
        return cast(kv[key]) if key in kv else default

    return SynthesisConfig(
        step_count=(get("step_min", int, base.step_count[0]),
                    get("step_max", int, base.step_count[1])),
        template_weights=tuple(templates.items()),
        max_facts=get("max_facts", int, base.max_facts),
        max_attempts=get("max_attempts", int, base.max_attempts),
        p_fresh=get("p_fresh", float, base.p_fresh),
        min_useful_steps=get("min_useful_steps", int, base.min_useful_steps),
        side_steps=(get("side_min", int, base.side_steps[0]),
                    get("side_max", int, base.side_steps[1])),
        spare_impl_rules=get("spare_impl_rules", int, base.spare_impl_rules),
        p_cycle_slot=get("p_cycle_slot", float, base.p_cycle_slot),
        distractor_rules=get("distractor_rules", int, base.distractor_rules),
    )


def build_corpus_config(args) -> CorpusConfig:
    kv = parse_kv_file(args.config) if args.config else {}
    weights = _weights_from_kv(kv)
    if args.weights:
        weights = _weights_from_kv(parse_kv_file(args.weights))
    count = args.count if args.count is not None else int(kv.get("count", "100"))
    seed = args.seed if args.seed is not None else int(kv.get("seed", "0"))
    return CorpusConfig(
        total_count=count,
        seed=seed,
        error_weights=weights,
        synthesis=_synthesis_from_kv(kv),
        k_first=int(kv.get("k_first", "2")),
        k_exclude_last=_as_bool(kv.get("k_exclude_last", "true")),
    )


def _echo_config(cfg: CorpusConfig, workers: int) -> None:
    print(f"# seed = {cfg.seed}")
    print(f"# count = {cfg.total_count}")
    print(f"# workers = {workers}")
    print(f"# config_digest = {cfg.digest()}")


def cmd_synth(args) -> int:
    try:
        cfg = build_corpus_config(args)
    except (ValueError, OSError) as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    workers = args.workers
    _echo_config(cfg, workers)
    try:
        stats = generate_corpus(cfg, args.out, workers=workers)
    except CorpusExhausted as exc:
        print(f"exhausted: {exc}", file=sys.stderr)
        return EXIT_EXHAUSTED
    stats_path = args.stats or args.out + ".stats"
    with open(stats_path, "w", encoding="utf-8") as fh:
        fh.write(f"config_digest = {cfg.digest()}\n")
        fh.write(f"schema_version = {cfg.schema_version}\n")
        fh.write(stats.to_text())
    print(f"wrote {stats.total} instances to {args.out}")
    print(f"stats in {stats_path}")
    return EXIT_OK


def cmd_verify(args) -> int:
    try:
        _, instances = read_corpus(args.corpus)
    except (OSError, MalformedRecordError, SchemaMismatchError) as exc:
        print(f"cannot read corpus: {exc}", file=sys.stderr)
        return EXIT_USAGE
    failures = 0
    for inst in instances:
        problems = []
        chain_report = verify_chain(inst.correct)
        if not chain_report.valid:
            problems.extend(chain_report.failures)
        error_report = verify_first_error(inst)
        if not error_report.ok:
            problems.extend(error_report.failures)
        labels = label_steps(inst)
        invalid_positions = [l.index for l in labels.erroneous if l.label == "invalid"]
        if not invalid_positions or invalid_positions[0] != inst.k:
            problems.append("label vector disagrees with the first-error index")
        if problems:
            failures += 1
            print(f"FAIL {inst.id}: {'; '.join(problems)}")
    print(f"verified {len(instances)} instances, {failures} failures")
    return EXIT_FAILED if failures else EXIT_OK


def cmd_realize(args) -> int:
    try:
        _, instances = read_corpus(args.corpus)
    except (OSError, MalformedRecordError, SchemaMismatchError) as exc:
        print(f"cannot read corpus: {exc}", file=sys.stderr)
        return EXIT_USAGE
    violations_total = 0
    lines = []
    for inst in instances:
        inst = realized(inst, mode="templated", nl_mode=args.nl_mode)
        violations = leak_lint(inst.nl, inst.k)
        for v in violations:
            print(f"LEAK {inst.id} step {v.step_index}: {v.word!r}")
        violations_total += len(violations)
        lines.append(serialize_instance(inst))
    with open(args.out, "w", encoding="utf-8") as fh:
        fh.write(json.dumps({"record": "header", "schema_version": 1,
                             "realized_from": args.corpus,
                             "nl_mode": args.nl_mode,
                             "config_digest": _flags_digest("realize",
                                                            args.nl_mode)},
                            separators=(",", ":")) + "\n")
        for line in lines:
            fh.write(line + "\n")
    print(f"realized {len(instances)} instances to {args.out}; "
          f"{violations_total} lint violations")
    if violations_total and args.nl_mode == "clean":
        return EXIT_FAILED
    return EXIT_OK


def cmd_eval(args) -> int:
    report_obj: dict = {
        "schema_version": 1,
        "config_digest": _flags_digest("eval", args.judge, args.threshold,
                                       args.include_correct),
    }
    if args.corpus:
        try:
            _, instances = read_corpus(args.corpus)
            judge = make_judge(args.judge)
        except (OSError, MalformedRecordError, SchemaMismatchError,
                ValueError) as exc:
            print(f"usage error: {exc}", file=sys.stderr)
            return EXIT_USAGE
        report = evaluate_instances(instances, judge, threshold=args.threshold,
                                    erroneous_only=not args.include_correct)
        print(report.to_text(), end="")
        report_obj["corpus"] = report.to_dict()
        report_obj["judge"] = args.judge
    if args.scored:
        try:
            records = load_scored_records(args.scored)
            scored = evaluate_scored_records(records, threshold=args.threshold)
        except (OSError, ValueError, KeyError) as exc:
            print(f"cannot read scored records: {exc}", file=sys.stderr)
            return EXIT_USAGE
        print(scored.to_text(), end="")
        report_obj["scored"] = scored.to_dict()
    if args.pools:
        try:
            pools = load_pools(args.pools)
        except (OSError, ValueError, KeyError) as exc:
            print(f"cannot read pools: {exc}", file=sys.stderr)
            return EXIT_USAGE
        pool_metrics = evaluate_pools(pools)
        for key in sorted(pool_metrics):
            print(f"{key} = {pool_metrics[key]:.4f}")
        report_obj["pools"] = pool_metrics
    if not args.corpus and not args.pools and not args.scored:
        print("nothing to evaluate: pass --corpus, --scored, and/or --pools",
              file=sys.stderr)
        return EXIT_USAGE
    if args.report:
        with open(args.report, "w", encoding="utf-8") as fh:
            json.dump(report_obj, fh, indent=2, sort_keys=True)
            fh.write("\n")
    return EXIT_OK


def cmd_stats(args) -> int:
    try:
        _, instances = read_corpus(args.corpus)
    except (OSError, MalformedRecordError, SchemaMismatchError) as exc:
        print(f"cannot read corpus: {exc}", file=sys.stderr)
        return EXIT_USAGE
    if not instances:
        print("empty corpus", file=sys.stderr)
        return EXIT_FAILED
    counts: dict[str, int] = {}
    for inst in instances:
        counts[inst.error_type.value] = counts.get(inst.error_type.value, 0) + 1
    total = len(instances)
    width = max(len(n) for n in counts)
    print(f"{'Error Type'.ljust(width)}  Count  Share")
    for name in sorted(counts, key=lambda n: -counts[n]):
        share = 100.0 * counts[name] / total
        print(f"{name.ljust(width)}  {counts[name]:5d}  {share:5.1f}%")
    print(f"{'total'.ljust(width)}  {total:5d}  100.0%")
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="counterchain",
        description="Paired correct/corrupted reasoning chains with verified "
                    "first-error positions.")
    sub = parser.add_subparsers(dest="command", required=True)

    synth = sub.add_parser("synth", help="generate a corpus")
    synth.add_argument("--count", type=int, default=None)
    synth.add_argument("--seed", type=int, default=None)
    synth.add_argument("--config", default=None, help="flat key=value file")
    synth.add_argument("--weights", default=None,
                       help="error-weight key=value file")
    synth.add_argument("--out", required=True)
    synth.add_argument("--stats", default=None)
    synth.add_argument("--workers", type=int, default=1)
    synth.set_defaults(func=cmd_synth)

    verify = sub.add_parser("verify", help="re-verify a corpus file")
    verify.add_argument("corpus")
    verify.set_defaults(func=cmd_verify)

    realize_cmd = sub.add_parser("realize", help="attach natural language")
    realize_cmd.add_argument("corpus")
    realize_cmd.add_argument("--out", required=True)
    realize_cmd.add_argument("--nl-mode", choices=("clean", "annotated"),
                             default="clean")
    realize_cmd.set_defaults(func=cmd_realize)

    evaluate = sub.add_parser("eval", help="score a judge and/or pools")
    evaluate.add_argument("--corpus", default=None)
    evaluate.add_argument("--judge", default="oracle")
    evaluate.add_argument("--threshold", type=float, default=0.5)
    evaluate.add_argument("--include-correct", action="store_true")
    evaluate.add_argument("--scored", default=None,
                          help="externally scored trajectory file")
    evaluate.add_argument("--pools", default=None)
    evaluate.add_argument("--report", default=None)
    evaluate.set_defaults(func=cmd_eval)

    stats = sub.add_parser("stats", help="error-type distribution of a corpus")
    stats.add_argument("corpus")
    stats.set_defaults(func=cmd_stats)

    return parser


def main(argv: Optional[list[str]] = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_USAGE if exc.code else EXIT_OK
    return args.func(args)


if __name__ == "__main__":
    sys.exit(main())
