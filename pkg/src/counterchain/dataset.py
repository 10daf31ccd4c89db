"""Instance labeling, corpus generation, and line-delimited serialization.

A corpus file is one JSON object per line: a header record carrying the
schema version, seed, and effective-config digest, then one instance record
per line. Rules, facts, and steps are stored as canonical text so records
stay human-auditable. Unknown fields on an instance record survive a
round-trip verbatim.

Corpus generation hits the configured error-type mix exactly: the weight
table is converted into per-type quotas by largest remainder, shuffled into a
seeded per-index schedule, and each index rejection-samples chains and
injection sites until its scheduled type verifies. Every index derives its
own seed from (corpus seed, index), so output is byte-identical regardless
of worker count.
"""

from __future__ import annotations

import hashlib
import json
import random
import struct
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from typing import Iterable, Iterator, Optional

from .injection import (
    DownstreamStuck,
    ErroneousChain,
    ErrorType,
    InjectionInfeasible,
    Instance,
    applicable_errors,
    inject,
    k_positions,
    verify_first_error,
)
from .injection import InjectionConfig
from .logic import parse_literal, parse_rule, render_rule
from .realize import ContextProfile
from .synthesis import CorrectChain, Step, SynthesisConfig, synthesize_chain

SCHEMA_VERSION = 1

# published error-type mix of the reference 20k corpus, as weights
DEFAULT_ERROR_WEIGHTS: tuple[tuple[ErrorType, float], ...] = (
    (ErrorType.XOR_AS_EQUIV, 3610),
    (ErrorType.XOR_AS_OR, 3609),
    (ErrorType.OR_AND_CONFUSION, 3598),
    (ErrorType.DROP_CONDITION, 1934),
    (ErrorType.IMPLICATION_MISUSE, 1466),
    (ErrorType.CONVERSE_ERROR, 1299),
    (ErrorType.REDUNDANT_STEP, 1185),
    (ErrorType.CIRCULAR_REFERENCE, 946),
    (ErrorType.PARTIAL_EVALUATION, 913),
    (ErrorType.MISSING_PREREQUISITE, 869),
    (ErrorType.VACUOUS_TRUTH_ERROR, 571),
)


class SchemaMismatchError(ValueError):
    pass


class MalformedRecordError(ValueError):
    def __init__(self, message: str, line_number: Optional[int] = None):
        where = f" (line {line_number})" if line_number else ""
        super().__init__(f"{message}{where}")
        self.line_number = line_number


class CorpusExhausted(RuntimeError):
    def __init__(self, message: str, reasons: dict[str, int]):
        super().__init__(f"{message}; rejections: {reasons}")
        self.reasons = reasons


# ---------------------------------------------------------------------------
# labels


@dataclass(frozen=True)
class StepLabel:
    index: int
    label: str  # "valid" | "invalid"


@dataclass(frozen=True)
class InstanceLabels:
    correct: tuple[StepLabel, ...]
    erroneous: tuple[StepLabel, ...]


def label_steps(inst: Instance, strategy: str = "all_after_error") -> InstanceLabels:
    """Correct-chain steps are all valid; in the erroneous chain the first
    corrupted step and everything after it is invalid."""
    if strategy != "all_after_error":
        raise ValueError(f"unknown labeling strategy: {strategy!r}")
    k = inst.k
    correct = tuple(StepLabel(s.index, "valid") for s in inst.correct.steps)
    erroneous = tuple(
        StepLabel(s.index, "valid" if s.index < k else "invalid")
        for s in inst.erroneous.steps
    )
    return InstanceLabels(correct, erroneous)


# ---------------------------------------------------------------------------
# serialization


def _step_to_obj(step: Step) -> dict:
    return {
        "supports": [str(l) for l in step.supports],
        "rule": render_rule(step.rule),
        "conclusion": str(step.conclusion),
    }


def _step_from_obj(obj: dict, index: int) -> Step:
    return Step(
        index=index,
        supports=tuple(parse_literal(t) for t in obj["supports"]),
        rule=parse_rule(obj["rule"]),
        conclusion=parse_literal(obj["conclusion"]),
    )


_KNOWN_KEYS = (
    "record", "schema_version", "id", "seed", "goal", "base_facts", "rules",
    "correct_steps", "erroneous_steps", "first_error_index", "error_type",
    "error_group", "correct_labels", "erroneous_labels",
    "reached_goal_polarity", "context", "nl",
)


def serialize_instance(inst: Instance) -> str:
    labels = label_steps(inst)
    obj: dict = {
        "record": "instance",
        "schema_version": SCHEMA_VERSION,
        "id": inst.id,
        "seed": inst.seed,
        "goal": str(inst.goal),
        "base_facts": [str(l) for l in inst.base_facts],
        "rules": [render_rule(r) for r in inst.rules],
        "correct_steps": [_step_to_obj(s) for s in inst.correct.steps],
        "erroneous_steps": [_step_to_obj(s) for s in inst.erroneous.steps],
        "first_error_index": inst.k,
        "error_type": inst.error_type.value,
        "error_group": inst.error_type.group.value,
        "correct_labels": [l.label for l in labels.correct],
        "erroneous_labels": [l.label for l in labels.erroneous],
        "reached_goal_polarity": inst.reached_goal_polarity,
        "context": ({"name": inst.context.name, "background": inst.context.background}
                    if inst.context is not None else None),
        "nl": inst.nl,
    }
    for key, value in inst.extras.items():
        if key not in _KNOWN_KEYS:
            obj[key] = value
    return json.dumps(obj, separators=(",", ":"))


def _replay_state_log(chain: CorrectChain, steps: tuple[Step, ...]):
    state = chain.base_state()
    log = []
    for step in steps:
        if not state.holds(step.conclusion):
            state = state.with_literal(step.conclusion, overwrite=True)
        log.append(state)
    return tuple(log)


def deserialize_instance(line: str, line_number: Optional[int] = None) -> Instance:
    try:
        obj = json.loads(line)
    except json.JSONDecodeError as exc:
        raise MalformedRecordError(f"not valid JSON: {exc}", line_number) from exc
    if not isinstance(obj, dict) or obj.get("record") != "instance":
        raise MalformedRecordError("not an instance record", line_number)
    version = obj.get("schema_version")
    if version != SCHEMA_VERSION:
        raise SchemaMismatchError(
            f"schema_version {version!r} unsupported (expected {SCHEMA_VERSION})")
    try:
        goal = parse_literal(obj["goal"])
        base = tuple(parse_literal(t) for t in obj["base_facts"])
        rules = tuple(parse_rule(t) for t in obj["rules"])
        correct_steps = tuple(_step_from_obj(s, i + 1)
                              for i, s in enumerate(obj["correct_steps"]))
        erroneous_steps = tuple(_step_from_obj(s, i + 1)
                                for i, s in enumerate(obj["erroneous_steps"]))
        correct = CorrectChain(base, rules, correct_steps, goal)
        error_type = ErrorType(obj["error_type"])
        stored_group = obj.get("error_group")
        if stored_group is not None and stored_group != error_type.group.value:
            raise MalformedRecordError(
                f"error_group {stored_group!r} contradicts error_type "
                f"{error_type.value!r}", line_number)
        erroneous = ErroneousChain(
            steps=erroneous_steps,
            first_error_index=int(obj["first_error_index"]),
            error_type=error_type,
            corrupted_state_log=_replay_state_log(correct, erroneous_steps),
        )
        context = obj.get("context")
        profile = (ContextProfile(context["name"], context["background"])
                   if context else None)
        extras = {k: v for k, v in obj.items() if k not in _KNOWN_KEYS}
        return Instance(
            id=obj["id"], goal=goal, base_facts=base, rules=rules,
            correct=correct, erroneous=erroneous, seed=int(obj.get("seed", 0)),
            context=profile, nl=obj.get("nl"), extras=extras,
        )
    except (KeyError, ValueError, TypeError) as exc:
        if isinstance(exc, (SchemaMismatchError, MalformedRecordError)):
            raise
        raise MalformedRecordError(f"malformed instance record: {exc}",
                                   line_number) from exc


def header_record(cfg: "CorpusConfig") -> str:
    obj = {
        "record": "header",
        "schema_version": SCHEMA_VERSION,
        "seed": cfg.seed,
        "total_count": cfg.total_count,
        "config_digest": cfg.digest(),
    }
    return json.dumps(obj, separators=(",", ":"))


def read_corpus(path: str) -> tuple[Optional[dict], list[Instance]]:
    """Returns (header, instances); raises with a line number on bad records."""
    header: Optional[dict] = None
    instances: list[Instance] = []
    with open(path, "r", encoding="utf-8") as fh:
        for number, line in enumerate(fh, start=1):
            line = line.strip()
            if not line:
                continue
            if line.startswith('{"record":"header"'):
                try:
                    header = json.loads(line)
                except json.JSONDecodeError as exc:
                    raise MalformedRecordError(f"bad header: {exc}", number) from exc
                version = header.get("schema_version")
                if version != SCHEMA_VERSION:
                    raise SchemaMismatchError(
                        f"schema_version {version!r} unsupported")
                continue
            instances.append(deserialize_instance(line, number))
    return header, instances


# ---------------------------------------------------------------------------
# corpus generation


@dataclass(frozen=True)
class CorpusConfig:
    total_count: int
    seed: int
    error_weights: tuple[tuple[ErrorType, float], ...] = DEFAULT_ERROR_WEIGHTS
    synthesis: SynthesisConfig = SynthesisConfig()
    k_first: int = 2
    k_exclude_last: bool = True
    max_chain_attempts: int = 600
    sites_per_chain: int = 4
    schema_version: int = SCHEMA_VERSION

    def __post_init__(self):
        if self.total_count <= 0:
            raise ValueError("total_count must be positive")
        covered = {e for e, _ in self.error_weights}
        missing = set(ErrorType) - covered
        if missing:
            raise ValueError(f"error_weights must cover all types; missing "
                             f"{sorted(t.value for t in missing)}")
        if any(w < 0 for _, w in self.error_weights):
            raise ValueError("error weights must be non-negative")

    def digest(self) -> str:
        payload = repr((self.total_count, self.seed, self.error_weights,
                        self.synthesis, self.k_first, self.k_exclude_last,
                        self.schema_version)).encode()
        return hashlib.sha256(payload).hexdigest()[:16]


def derive_seed(seed: int, index: int, tag: str = "") -> int:
    digest = hashlib.blake2b(
        struct.pack("<qq", seed, index) + tag.encode(), digest_size=8).digest()
    return int.from_bytes(digest, "little") & (2 ** 63 - 1)


def hash_split(ids: Iterable[str], fractions: dict[str, float],
               seed: int = 0) -> dict[str, str]:
    """Stable id → split assignment by seeded hashing.

    Each id lands in the same split for a given seed regardless of corpus
    order or size, so splits stay disjoint and reproducible when a corpus is
    extended.
    """
    if not fractions:
        raise ValueError("no splits given")
    if any(f < 0 for f in fractions.values()):
        raise ValueError("fractions must be non-negative")
    mass = sum(fractions.values())
    if mass <= 0:
        raise ValueError("fractions sum to zero")
    edges: list[tuple[float, str]] = []
    acc = 0.0
    for name, fraction in fractions.items():
        acc += fraction / mass
        edges.append((acc, name))
    out: dict[str, str] = {}
    for ident in ids:
        digest = hashlib.blake2b(f"{seed}:{ident}".encode(),
                                 digest_size=8).digest()
        point = int.from_bytes(digest, "little") / 2 ** 64
        for edge, name in edges:
            if point < edge or (edge, name) == edges[-1]:
                out[ident] = name
                break
    return out


def type_quotas(total: int, weights: Iterable[tuple[ErrorType, float]],
                ) -> dict[ErrorType, int]:
    """Largest-remainder allocation of ``total`` over the weight table."""
    weights = list(weights)
    mass = sum(w for _, w in weights)
    if mass <= 0:
        raise ValueError("error weights sum to zero")
    raw = [(e, total * w / mass) for e, w in weights]
    quotas = {e: int(x) for e, x in raw}
    short = total - sum(quotas.values())
    remainders = sorted(raw, key=lambda ew: (-(ew[1] - int(ew[1])), ew[0].value))
    for e, _ in remainders[:short]:
        quotas[e] += 1
    return quotas


def type_schedule(cfg: CorpusConfig) -> list[ErrorType]:
    """Per-index target types: quota slots in a seeded shuffle, so workers can
    generate any index independently."""
    quotas = type_quotas(cfg.total_count, cfg.error_weights)
    slots: list[ErrorType] = []
    for e, _ in DEFAULT_ERROR_WEIGHTS:  # stable type order
        slots.extend([e] * quotas.get(e, 0))
    rng = random.Random(derive_seed(cfg.seed, -1, "schedule"))
    rng.shuffle(slots)
    return slots


def build_instance(cfg: CorpusConfig, index: int,
                   target: ErrorType) -> tuple[Instance, dict[str, int]]:
    """Rejection-sample chains and injection sites until ``target`` verifies."""
    seed = derive_seed(cfg.seed, index)
    rng = random.Random(seed)
    icfg = InjectionConfig(error_weights=cfg.error_weights, k_first=cfg.k_first,
                           k_exclude_last=cfg.k_exclude_last)
    reasons: dict[str, int] = {}

    def note(reason: str) -> None:
        reasons[reason] = reasons.get(reason, 0) + 1

    # shape-changing corruptions must keep the erroneous chain inside the
    # configured step band
    lo, hi = cfg.synthesis.step_count
    delta = {ErrorType.REDUNDANT_STEP: 1, ErrorType.MISSING_PREREQUISITE: -1}
    shift = delta.get(target, 0)

    for _ in range(cfg.max_chain_attempts):
        chain = synthesize_chain(cfg.synthesis, rng.getrandbits(63))
        if not lo <= len(chain.steps) + shift <= hi:
            note("length-budget")
            continue
        sites = [k for k in k_positions(len(chain.steps), icfg)
                 if target in applicable_errors(chain, k)]
        if not sites:
            note("no-applicable-site")
            continue
        rng.shuffle(sites)
        for k in sites[: cfg.sites_per_chain]:
            try:
                err = inject(chain, k, target, seed=rng.getrandbits(63))
            except InjectionInfeasible:
                note("infeasible")
                continue
            except DownstreamStuck:
                note("downstream-stuck")
                continue
            inst = Instance(
                id=f"{cfg.seed & 0xFFFFFFFF:08x}-{index:06d}",
                goal=chain.goal, base_facts=chain.base_facts, rules=chain.rules,
                correct=chain, erroneous=err, seed=seed,
            )
            report = verify_first_error(inst)
            if report.ok:
                return inst, reasons
            note(report.reason().split(":")[0])
    raise CorpusExhausted(
        f"index {index}: could not realize {target.value} after "
        f"{cfg.max_chain_attempts} chains", reasons)


@dataclass
class CorpusStats:
    total: int = 0
    accepted_per_type: dict[str, int] = field(default_factory=dict)
    rejections: dict[str, int] = field(default_factory=dict)
    mean_step_count: float = 0.0
    distinct_templates: int = 0

    def to_text(self) -> str:
        lines = [f"total = {self.total}"]
        for name in sorted(self.accepted_per_type):
            lines.append(f"accepted.{name} = {self.accepted_per_type[name]}")
        share_mass = sum(self.accepted_per_type.values()) or 1
        for name in sorted(self.accepted_per_type):
            lines.append(f"share.{name} = "
                         f"{self.accepted_per_type[name] / share_mass:.4f}")
        for name in sorted(self.rejections):
            lines.append(f"rejected.{name} = {self.rejections[name]}")
        lines.append(f"mean_step_count = {self.mean_step_count:.4f}")
        lines.append(f"distinct_templates = {self.distinct_templates}")
        return "\n".join(lines) + "\n"


_WORKER_CFG: Optional[CorpusConfig] = None


def _init_worker(cfg: CorpusConfig) -> None:
    global _WORKER_CFG
    _WORKER_CFG = cfg


def _worker_build(args: tuple[int, str],
                  ) -> tuple[str, str, int, tuple[str, ...], dict[str, int]]:
    index, target_value = args
    inst, reasons = build_instance(_WORKER_CFG, index, ErrorType(target_value))
    line = serialize_instance(inst)
    templates = tuple({r.template.value for r in inst.rules})
    return line, target_value, len(inst.correct.steps), templates, reasons


def generate_instances(cfg: CorpusConfig, workers: int = 1,
                       ) -> Iterator[tuple[str, str, int, tuple[str, ...], dict[str, int]]]:
    """Yields (line, error type, step count, templates, rejection reasons) in
    index order."""
    schedule = type_schedule(cfg)
    tasks = [(i, schedule[i].value) for i in range(cfg.total_count)]
    if workers <= 1:
        _init_worker(cfg)
        for task in tasks:
            yield _worker_build(task)
        return
    with ProcessPoolExecutor(max_workers=workers, initializer=_init_worker,
                             initargs=(cfg,)) as pool:
        chunk = max(1, cfg.total_count // (workers * 8))
        yield from pool.map(_worker_build, tasks, chunksize=chunk)


def generate_corpus(cfg: CorpusConfig, out_path: str, workers: int = 1,
                    ) -> CorpusStats:
    """Write exactly cfg.total_count verified instances plus a header line;
    byte-identical output for a fixed config regardless of worker count."""
    stats = CorpusStats()
    step_total = 0
    templates: set[str] = set()
    with open(out_path, "w", encoding="utf-8") as fh:
        fh.write(header_record(cfg) + "\n")
        for line, type_value, n_steps, used, reasons in generate_instances(cfg, workers):
            fh.write(line + "\n")
            stats.total += 1
            stats.accepted_per_type[type_value] = \
                stats.accepted_per_type.get(type_value, 0) + 1
            step_total += n_steps
            templates.update(used)
            for reason, count in reasons.items():
                stats.rejections[reason] = stats.rejections.get(reason, 0) + count
    if stats.total:
        stats.mean_step_count = step_total / stats.total
    stats.distinct_templates = len(templates)
    return stats
