"""Natural-language realization of symbolic instances.

The default engine is a deterministic offline templater: one predicate frame
per fact, shared by both chains, so the correct and erroneous trajectory
differ in text exactly where they differ in symbols. An external translator
can be plugged in through ``TranslatorClient``; its replies are validated for
coverage and uniqueness and linted for label-leaking words before acceptance.
Tests always substitute a scripted client; nothing here performs network I/O
on its own.
"""

from __future__ import annotations

import dataclasses
import json
import os
import random
import re
from dataclasses import dataclass
from typing import Optional, Protocol, Sequence

from . import lexicon
from .injection import Instance
from .logic import FactId, Literal, Rule
from .synthesis import Step

LEAK_WORDS: tuple[str, ...] = (
    "error", "mistake", "wrong", "invalid", "unsupported", "evidence",
    "established", "assumes", "depends", "relies", "repeats", "restates",
)

LEAK_PHRASES: tuple[str, ...] = (
    "the rule says", "according to the rule", "this step", "the conclusion",
)

_LEAK_RE = re.compile(r"\b(" + "|".join(LEAK_WORDS) + r")\b", re.IGNORECASE)
_PHRASE_RES = tuple(re.compile(r"\b" + re.escape(p) + r"\b", re.IGNORECASE)
                    for p in LEAK_PHRASES)


@dataclass(frozen=True)
class ContextProfile:
    name: str
    background: str


@dataclass(frozen=True)
class PredicateEntry:
    predicate: str
    positive: str  # clause for the true value
    negative: str  # clause for the false value

    def clause(self, value: bool) -> str:
        return self.positive if value else self.negative

    def sentence(self, value: bool) -> str:
        clause = self.clause(value)
        return clause[0].upper() + clause[1:] + "."


@dataclass(frozen=True)
class PredicateMap:
    context: ContextProfile
    entries: dict[FactId, PredicateEntry]

    def clause(self, lit: Literal) -> str:
        return self.entries[lit.fact].clause(lit.value)

    def sentence(self, lit: Literal) -> str:
        return self.entries[lit.fact].sentence(lit.value)


class PredicateMapInvalid(ValueError):
    pass


# ---------------------------------------------------------------------------
# external translator contract


@dataclass(frozen=True)
class PromptBundle:
    """Role-tagged prompt sections, in order; the wire unit sent to a
    translator backend."""

    sections: tuple[tuple[str, str], ...]

    def text(self, role: str) -> str:
        return "\n\n".join(body for r, body in self.sections if r == role)


class TranslatorClient(Protocol):
    def send(self, bundle: PromptBundle) -> str:  # pragma: no cover - protocol
        ...


@dataclass(frozen=True)
class TranslatorSettings:
    endpoint: str = ""
    model: str = ""
    timeout: float = 30.0
    retries: int = 2

    @classmethod
    def from_env(cls) -> "TranslatorSettings":
        return cls(
            endpoint=os.environ.get("COUNTERCHAIN_TRANSLATOR_ENDPOINT", ""),
            model=os.environ.get("COUNTERCHAIN_TRANSLATOR_MODEL", ""),
            timeout=float(os.environ.get("COUNTERCHAIN_TRANSLATOR_TIMEOUT", "30")),
            retries=int(os.environ.get("COUNTERCHAIN_TRANSLATOR_RETRIES", "2")),
        )


class ScriptedTranslator:
    """Replays canned replies and records every bundle; the stand-in used
    wherever tests exercise the external path."""

    def __init__(self, replies: Sequence[str]):
        self.replies = list(replies)
        self.transcript: list[PromptBundle] = []

    def send(self, bundle: PromptBundle) -> str:
        self.transcript.append(bundle)
        if not self.replies:
            raise RuntimeError("scripted translator ran out of replies")
        return self.replies.pop(0)


def background_prompt(name: str) -> PromptBundle:
    return PromptBundle((
        ("system", "Write a brief background story for one person. Keep it "
                   "natural and concise, and make it a usable setting for "
                   "statements about what the person does. Output only the "
                   "story."),
        ("user", f"Write a background story for someone named {name}."),
    ))


def predicate_map_prompt(background: str, name: str,
                         fact_symbols: Sequence[str]) -> PromptBundle:
    return PromptBundle((
        ("system", "Turn fact symbols such as [F0] into vivid English "
                   "predicates that fit the character's background. Reply "
                   "with valid JSON only: one entry per fact symbol, each "
                   "with a predicate name, a natural sentence for the true "
                   "value, and a natural sentence for the false value. Every "
                   "predicate must be distinct, sentence shapes should be "
                   "varied, and negative forms should read naturally. No "
                   "markdown, no extra text."),
        ("user", f"Background: {background}\n\nName: {name}\n\n"
                 f"Fact symbols: {', '.join(fact_symbols)}\n\n"
                 "Write one predicate per fact symbol. Output only JSON."),
    ))


def rule_prompt(rule_text: str, mapping_json: str, name: str) -> PromptBundle:
    return PromptBundle((
        ("system", "Turn the symbolic rule into natural, conversational "
                   "English, using the predicate mapping. Vary the sentence "
                   "shape: for an arrow use forms like 'when X, Y follows'; "
                   "for 'or' say at least one side holds; for 'and' say both "
                   "hold; for 'xor' say exactly one side holds and never "
                   "both. Read [[F0]] the same as [F0]. Output only the "
                   "rewritten rule."),
        ("user", f"Rule: {rule_text}\n\nPredicate mapping: {mapping_json}\n\n"
                 f"Name: {name}\n\nRewrite the rule in plain English."),
    ))


def step_prompt(background: str, name: str, facts_nl: Sequence[str],
                rule_nl: str, conclusion_nl: str, status: str,
                error_type: str = "none") -> PromptBundle:
    avoid = ", ".join(f'"{w}"' for w in LEAK_WORDS)
    return PromptBundle((
        ("system", "Turn one reasoning step into concise natural English, "
                   "faithful to the given facts, rule, and outcome. Output "
                   "only the step text. When the text is used as scoring "
                   f"input, avoid giveaway words such as {avoid}, and avoid "
                   "meta phrases that talk about rules or steps instead of "
                   "the situation."),
        ("user", f"Background: {background}\n\nName: {name}\n\n"
                 f"Facts: {'; '.join(facts_nl)}\n\nRule: {rule_nl}\n\n"
                 f"Outcome: {conclusion_nl}\n\nStep status: {status}\n\n"
                 f"Issue kind: {error_type}\n\n"
                 "Write one or two sentences keeping every truth value as "
                 "given."),
    ))


# ---------------------------------------------------------------------------
# predicate maps


def _instance_facts(inst: Instance) -> list[FactId]:
    return list(inst.correct.theory().universe)


def build_predicate_map(inst: Instance, mode: str = "templated", seed: int = 0,
                        client: Optional[TranslatorClient] = None,
                        settings: Optional[TranslatorSettings] = None,
                        ) -> PredicateMap:
    """Deterministic lexicon draw in templated mode; a validated external
    reply in external mode."""
    facts = _instance_facts(inst)
    if mode == "templated":
        rng = random.Random(seed)
        name = rng.choice(lexicon.NAMES)
        background = rng.choice(lexicon.BACKGROUND_FRAMES).format(name=name)
        frames = rng.sample(lexicon.PREDICATE_FRAMES, len(facts))
        entries = {
            fact: PredicateEntry(
                predicate=key,
                positive=pos.format(name=name),
                negative=neg.format(name=name),
            )
            for fact, (key, pos, neg) in zip(facts, frames)
        }
        return PredicateMap(ContextProfile(name, background), entries)

    if mode != "external":
        raise ValueError(f"unknown realization mode: {mode!r}")
    if client is None:
        raise ValueError("external mode needs a TranslatorClient")
    settings = settings or TranslatorSettings.from_env()
    rng = random.Random(seed)
    name = rng.choice(lexicon.NAMES)
    background = client.send(background_prompt(name)).strip()
    symbols = [str(f) for f in facts]
    last_error: Optional[Exception] = None
    for _ in range(max(1, settings.retries + 1)):
        reply = client.send(predicate_map_prompt(background, name, symbols))
        try:
            entries = _parse_external_map(reply, facts)
            return PredicateMap(ContextProfile(name, background), entries)
        except PredicateMapInvalid as exc:
            last_error = exc
    raise PredicateMapInvalid(f"translator kept returning bad mappings: {last_error}")


def _parse_external_map(reply: str, facts: Sequence[FactId],
                        ) -> dict[FactId, PredicateEntry]:
    try:
        obj = json.loads(reply)
    except json.JSONDecodeError as exc:
        raise PredicateMapInvalid(f"reply is not JSON: {exc}") from exc
    entries: dict[FactId, PredicateEntry] = {}
    names: set[str] = set()
    for fact in facts:
        item = obj.get(str(fact))
        if item is None:
            raise PredicateMapInvalid(f"mapping misses symbol {fact}")
        try:
            entry = PredicateEntry(item["predicate"], item["true"], item["false"])
        except (KeyError, TypeError) as exc:
            raise PredicateMapInvalid(f"bad entry for {fact}: {exc}") from exc
        if not entry.positive or not entry.negative:
            raise PredicateMapInvalid(f"empty sentence for {fact}")
        if entry.predicate in names:
            raise PredicateMapInvalid(f"duplicate predicate {entry.predicate!r}")
        for text in (entry.positive, entry.negative):
            if _scan_text(text):
                raise PredicateMapInvalid(f"label-leaking wording for {fact}: "
                                          f"{text!r}")
        names.add(entry.predicate)
        entries[fact] = entry
    return entries


# ---------------------------------------------------------------------------
# realization


def _frame_pick(options: Sequence[str], seed: int, *salt: int) -> str:
    key = seed & 0xFFFFFFFFFFFF
    for part in salt:
        key = (key * 1000003 + part + 1) & 0xFFFFFFFFFFFF
    return random.Random(key).choice(options)


def _realize_rule(rule: Rule, pmap: PredicateMap, seed: int, salt: int) -> str:
    frames = lexicon.RULE_FRAMES[rule.template.value]
    frame = _frame_pick(frames, seed, 71, salt)
    facts = rule.facts()
    slots = {}
    for key, fact in zip(("a", "b", "c"), facts):
        slots[key] = pmap.entries[fact].positive
    return frame.format(**slots)


def _realize_step(step: Step, rule_text: str, pmap: PredicateMap, seed: int,
                  position: int) -> dict:
    supports = [pmap.clause(l) for l in step.supports]
    conclusion = pmap.clause(step.conclusion)
    frame = _frame_pick(lexicon.STEP_FRAMES, seed, 113, position)
    facts_joined = ", and ".join(supports)
    text = frame.format(facts=facts_joined, why=rule_text, concl=conclusion)
    return {
        "text": text,
        "rule_text": rule_text,
        "support_texts": supports,
        "conclusion_text": conclusion,
    }


_ANNOTATIONS = {
    "drop_condition": "a needed part of the compound condition was ignored",
    "implication_misuse": "the arrow's truth condition was violated",
    "or_and_confusion": "an inclusive alternative was treated as if both "
                        "sides had to hold",
    "partial_evaluation": "only part of the compound was considered",
    "xor_as_or": "an exclusive split was treated as an inclusive one",
    "xor_as_equiv": "an exclusive split was treated as an agreement",
    "vacuous_truth_error": "a consequent was updated although the antecedent "
                           "did not hold",
    "converse_error": "the arrow was applied in the converse direction",
    "redundant_step": "the derivation re-does work already in the prefix",
    "missing_prerequisite": "a bridge fact was used before being derived",
    "circular_reference": "two derivations lean on each other in a cycle",
}


def realize_instance(inst: Instance, pmap: PredicateMap, mode: str = "clean",
                     seed: int = 0) -> dict:
    """NL record covering goal, base facts, rules, and both chains.

    Both chains share the predicate map and the per-position frame choices,
    so prefix steps render byte-identically and later differences all trace
    back to symbolic differences. ``annotated`` mode adds a mechanism note to
    each erroneous step from the corruption on; the note is a separate field,
    never part of the step text.
    """
    if mode not in ("clean", "annotated"):
        raise ValueError(f"unknown nl mode: {mode!r}")
    rule_texts = {rule: _realize_rule(rule, pmap, seed, i)
                  for i, rule in enumerate(inst.rules)}
    goal_frame = _frame_pick(lexicon.GOAL_FRAMES, seed, 31)
    record: dict = {
        "mode": mode,
        "context": {"name": pmap.context.name,
                    "background": pmap.context.background},
        "predicates": {str(f): {"predicate": e.predicate, "true": e.positive,
                                "false": e.negative}
                       for f, e in sorted(pmap.entries.items())},
        "goal_text": goal_frame.format(concl=pmap.clause(inst.goal)),
        "base_fact_texts": [pmap.sentence(l) for l in inst.base_facts],
        "rule_texts": [rule_texts[r] for r in inst.rules],
        "correct_steps": [
            _realize_step(s, rule_texts.get(s.rule) or
                          _realize_rule(s.rule, pmap, seed, 997 + i),
                          pmap, seed, i)
            for i, s in enumerate(inst.correct.steps)
        ],
        "erroneous_steps": [
            _realize_step(s, rule_texts.get(s.rule) or
                          _realize_rule(s.rule, pmap, seed, 997 + i),
                          pmap, seed, i)
            for i, s in enumerate(inst.erroneous.steps)
        ],
    }
    if mode == "annotated":
        note = _ANNOTATIONS[inst.error_type.value]
        for i, step_record in enumerate(record["erroneous_steps"], start=1):
            if i >= inst.k:
                step_record["annotation"] = note
    return record


def realized(inst: Instance, mode: str = "templated", nl_mode: str = "clean",
             seed: Optional[int] = None,
             client: Optional[TranslatorClient] = None) -> Instance:
    """Instance with its NL record and context attached."""
    map_seed = inst.seed if seed is None else seed
    pmap = build_predicate_map(inst, mode=mode, seed=map_seed, client=client)
    record = realize_instance(inst, pmap, mode=nl_mode, seed=map_seed)
    return dataclasses.replace(inst, nl=record, context=pmap.context)


# ---------------------------------------------------------------------------
# label-leak lint


@dataclass(frozen=True)
class LeakViolation:
    step_index: int
    word: str
    text: str


def _scan_text(text: str) -> list[str]:
    found = [m.group(0).lower() for m in _LEAK_RE.finditer(text)]
    for pattern in _PHRASE_RES:
        found.extend(m.group(0).lower() for m in pattern.finditer(text))
    return found


def leak_lint(nl_record: dict, k: int) -> list[LeakViolation]:
    """Scan erroneous-chain step texts from the corruption on for the
    forbidden word list; word-boundary, case-insensitive."""
    violations: list[LeakViolation] = []
    steps = nl_record.get("erroneous_steps", [])
    for index, step_record in enumerate(steps, start=1):
        if index < k:
            continue
        fields = [step_record.get("text", ""), step_record.get("rule_text", ""),
                  step_record.get("conclusion_text", "")]
        fields.extend(step_record.get("support_texts", []))
        for text in fields:
            for word in _scan_text(text):
                violations.append(LeakViolation(index, word, text))
    return violations
