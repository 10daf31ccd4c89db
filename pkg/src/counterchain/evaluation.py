"""Step-level judge evaluation: first-error localization, per-step accuracy,
and Best-of-K candidate selection.

A judge scores one step in [0, 1] given the problem context and the
trajectory prefix. The built-in oracle is prover-backed: a step scores 1.0
only if every step in its prefix is valid and the step itself is valid
against the replayed state, which matches the labeling convention that marks
the first corrupted step and everything after it negative.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from typing import Callable, Optional, Protocol, Sequence

from .dataset import label_steps
from .injection import Instance
from .logic import Literal, Rule, State
from .prover import Theory
from .realize import PromptBundle
from .synthesis import Step, check_step_local


@dataclass(frozen=True)
class JudgeContext:
    goal: Literal
    base_facts: tuple[Literal, ...]
    rules: tuple[Rule, ...]
    theory: Theory

    @classmethod
    def for_instance(cls, inst: Instance) -> "JudgeContext":
        return cls(inst.goal, inst.base_facts, inst.rules, inst.correct.theory())


class Judge(Protocol):
    def score_step(self, context: JudgeContext, prefix: Sequence[Step],
                   step: Step) -> float:  # pragma: no cover - protocol
        ...


class OracleJudge:
    """Prover-backed reference judge.

    A step is worth 1.0 iff the whole prefix replays as valid and the step
    itself is valid under the replayed state: supports previously derived,
    a licensed pattern instantiated, a fresh conclusion, and entailment of
    the conclusion from the prefix.
    """

    def score_trajectory(self, context: JudgeContext,
                         steps: Sequence[Step]) -> list[float]:
        scores: list[float] = []
        state = State({l.fact: l.value for l in context.base_facts})
        established = set(context.base_facts)
        poisoned = False
        for step in steps:
            if poisoned:
                scores.append(0.0)
                continue
            check = check_step_local(context.theory, state, established, step)
            if check.ok:
                scores.append(1.0)
                state = state.with_literal(step.conclusion)
                established.add(step.conclusion)
            else:
                scores.append(0.0)
                poisoned = True
        return scores

    def score_step(self, context: JudgeContext, prefix: Sequence[Step],
                   step: Step) -> float:
        return self.score_trajectory(context, (*prefix, step))[-1]


@dataclass(frozen=True)
class ConstantJudge:
    value: float

    def score_step(self, context: JudgeContext, prefix: Sequence[Step],
                   step: Step) -> float:
        return self.value


class LabelWordJudge:
    """Adapter for text-completion backends: maps the reply's label word to a
    score (default words: true/false)."""

    def __init__(self, complete: Callable[[str], str],
                 positive: str = "true", negative: str = "false"):
        self.complete = complete
        self.positive = positive
        self.negative = negative

    def score_step(self, context: JudgeContext, prefix: Sequence[Step],
                   step: Step) -> float:
        prompt = render_judge_prompt(context, prefix, step)
        reply = self.complete(prompt.text("user")).strip().lower()
        if reply.startswith(self.positive):
            return 1.0
        if reply.startswith(self.negative):
            return 0.0
        return 0.5


def render_judge_prompt(context: JudgeContext, prefix: Sequence[Step],
                        step: Step) -> PromptBundle:
    """Fielded scoring prompt: goal, initial information, previous steps,
    current step, answered by one label word."""
    initial = "; ".join(str(l) for l in context.base_facts)
    rules = "; ".join(str(r) for r in context.rules)
    previous = "\n".join(
        f"{i + 1}. {_step_text(s)}" for i, s in enumerate(prefix)) or "(none)"
    return PromptBundle((
        ("user",
         "Task: Decide whether the current reasoning step is logically "
         "sound.\n\n"
         f"Goal: {context.goal}\n\n"
         f"Initial Information: {initial}\nRules: {rules}\n\n"
         f"Previous Steps:\n{previous}\n\n"
         f"Current Step: {_step_text(step)}\n\n"
         "Answer:"),
    ))


def _step_text(step: Step) -> str:
    supports = ", ".join(str(l) for l in step.supports)
    return f"from {supports or '(nothing)'} via {step.rule} conclude {step.conclusion}"


# ---------------------------------------------------------------------------
# metrics


def predict_first_error(scores: Sequence[float],
                        threshold: float = 0.5) -> Optional[int]:
    """Earliest 1-based step scoring below threshold, or None."""
    for i, score in enumerate(scores, start=1):
        if score < threshold:
            return i
    return None


def first_error_accuracy(predictions: Sequence[Optional[int]],
                         gold: Sequence[Optional[int]]) -> float:
    """Exact-match rate on the first invalid position; trajectories without
    an error count as hits only on a None prediction."""
    if len(predictions) != len(gold):
        raise ValueError("prediction/gold length mismatch")
    if not gold:
        return 0.0
    return sum(p == g for p, g in zip(predictions, gold)) / len(gold)


def all_step_accuracy(predicted_labels: Sequence[Sequence[bool]],
                      gold_labels: Sequence[Sequence[bool]]) -> float:
    """Micro-average over every step of every trajectory; True means valid."""
    if len(predicted_labels) != len(gold_labels):
        raise ValueError("prediction/gold length mismatch")
    hits = total = 0
    for pred, gold in zip(predicted_labels, gold_labels):
        if len(pred) != len(gold):
            raise ValueError("per-trajectory label length mismatch")
        hits += sum(p == g for p, g in zip(pred, gold))
        total += len(gold)
    return hits / total if total else 0.0


def all_step_macro(predicted_labels: Sequence[Sequence[bool]],
                   gold_labels: Sequence[Sequence[bool]]) -> float:
    """Mean of per-trajectory step accuracies."""
    if not gold_labels:
        return 0.0
    per = []
    for pred, gold in zip(predicted_labels, gold_labels):
        per.append(sum(p == g for p, g in zip(pred, gold)) / len(gold))
    return sum(per) / len(per)


@dataclass
class EvalReport:
    first_error_acc: float
    all_step_acc: float
    all_step_macro: float
    n_instances: int
    per_type: dict[str, dict[str, float]] = field(default_factory=dict)
    threshold: float = 0.5
    erroneous_only: bool = True

    def to_dict(self) -> dict:
        return {
            "first_error_acc": self.first_error_acc,
            "all_step_acc": self.all_step_acc,
            "all_step_macro": self.all_step_macro,
            "n_instances": self.n_instances,
            "threshold": self.threshold,
            "erroneous_only": self.erroneous_only,
            "per_type": self.per_type,
        }

    def to_text(self) -> str:
        lines = [
            f"n_instances = {self.n_instances}",
            f"first_error = {self.first_error_acc:.4f}",
            f"all_step = {self.all_step_acc:.4f}",
            f"all_step_macro = {self.all_step_macro:.4f}",
        ]
        for name in sorted(self.per_type):
            row = self.per_type[name]
            lines.append(f"type.{name} = n:{int(row['n'])} "
                         f"first_error:{row['first_error_acc']:.4f} "
                         f"all_step:{row['all_step_acc']:.4f}")
        return "\n".join(lines) + "\n"


def _judge_scores(judge, context: JudgeContext, steps: Sequence[Step]) -> list[float]:
    scorer = getattr(judge, "score_trajectory", None)
    if scorer is not None:
        return [float(s) for s in scorer(context, steps)]
    out = []
    for i in range(len(steps)):
        out.append(float(judge.score_step(context, steps[:i], steps[i])))
    return out


def evaluate_instances(instances: Sequence[Instance], judge,
                       threshold: float = 0.5,
                       erroneous_only: bool = True) -> EvalReport:
    predictions: list[Optional[int]] = []
    gold_positions: list[Optional[int]] = []
    predicted_labels: list[list[bool]] = []
    gold_label_rows: list[list[bool]] = []
    rows_by_type: dict[str, list[int]] = {}

    for inst in instances:
        context = JudgeContext.for_instance(inst)
        labels = label_steps(inst)
        trajectories = [(inst.erroneous.steps, inst.k,
                         [l.label == "valid" for l in labels.erroneous])]
        if not erroneous_only:
            trajectories.append((inst.correct.steps, None,
                                 [True] * len(inst.correct.steps)))
        for steps, gold_k, gold_row in trajectories:
            scores = _judge_scores(judge, context, steps)
            predictions.append(predict_first_error(scores, threshold))
            gold_positions.append(gold_k)
            predicted_labels.append([s >= threshold for s in scores])
            gold_label_rows.append(gold_row)
            rows_by_type.setdefault(inst.error_type.value, []).append(
                len(predictions) - 1)

    report = EvalReport(
        first_error_acc=first_error_accuracy(predictions, gold_positions),
        all_step_acc=all_step_accuracy(predicted_labels, gold_label_rows),
        all_step_macro=all_step_macro(predicted_labels, gold_label_rows),
        n_instances=len(instances),
        threshold=threshold,
        erroneous_only=erroneous_only,
    )
    for name, rows in sorted(rows_by_type.items()):
        report.per_type[name] = {
            "n": float(len(rows)),
            "first_error_acc": first_error_accuracy(
                [predictions[r] for r in rows], [gold_positions[r] for r in rows]),
            "all_step_acc": all_step_accuracy(
                [predicted_labels[r] for r in rows],
                [gold_label_rows[r] for r in rows]),
        }
    return report


def make_judge(spec: str) -> object:
    """Built-in judges by name: ``oracle`` or ``constant:<v>``."""
    if spec == "oracle":
        return OracleJudge()
    if spec.startswith("constant:"):
        return ConstantJudge(float(spec.split(":", 1)[1]))
    raise ValueError(f"unknown judge spec: {spec!r}")


def evaluate_scored_records(records: Sequence[dict],
                            threshold: float = 0.5) -> EvalReport:
    """Metrics over externally scored trajectories: line objects carrying
    ``step_scores``, gold ``labels`` (valid/invalid), and an optional
    ``first_error_index`` (absent or null for clean trajectories)."""
    predictions: list[Optional[int]] = []
    gold_positions: list[Optional[int]] = []
    predicted_labels: list[list[bool]] = []
    gold_label_rows: list[list[bool]] = []
    for record in records:
        scores = [float(s) for s in record["step_scores"]]
        gold_row = [label == "valid" for label in record["labels"]]
        if len(scores) != len(gold_row):
            raise ValueError("step_scores and labels disagree in length")
        gold_k = record.get("first_error_index")
        predictions.append(predict_first_error(scores, threshold))
        gold_positions.append(int(gold_k) if gold_k is not None else None)
        predicted_labels.append([s >= threshold for s in scores])
        gold_label_rows.append(gold_row)
    return EvalReport(
        first_error_acc=first_error_accuracy(predictions, gold_positions),
        all_step_acc=all_step_accuracy(predicted_labels, gold_label_rows),
        all_step_macro=all_step_macro(predicted_labels, gold_label_rows),
        n_instances=len(records),
        threshold=threshold,
    )


def load_scored_records(path: str) -> list[dict]:
    records = []
    with open(path, "r", encoding="utf-8") as fh:
        for line in fh:
            line = line.strip()
            if not line:
                continue
            obj = json.loads(line)
            if obj.get("record") == "header":
                continue
            records.append(obj)
    return records


# ---------------------------------------------------------------------------
# Best-of-K


@dataclass(frozen=True)
class Candidate:
    step_scores: tuple[float, ...]
    answer: str = ""
    correct: bool = False


@dataclass(frozen=True)
class CandidatePool:
    candidates: tuple[Candidate, ...]

    def __post_init__(self):
        if not self.candidates:
            raise ValueError("pool must hold at least one candidate")
        for c in self.candidates:
            if not c.step_scores:
                raise ValueError("candidate without step scores")
            if any(not 0.0 <= s <= 1.0 for s in c.step_scores):
                raise ValueError("step scores must lie in [0, 1]")


def trajectory_score(candidate: Candidate) -> float:
    """Aggregate by the min rule: the weakest step decides."""
    return min(candidate.step_scores)


def bestofk_select(pool: CandidatePool) -> int:
    """Index of the highest min-aggregated candidate; lowest index on ties."""
    best_index = 0
    best = trajectory_score(pool.candidates[0])
    for i, candidate in enumerate(pool.candidates[1:], start=1):
        score = trajectory_score(candidate)
        if score > best:
            best, best_index = score, i
    return best_index


def majority_at_k(pool: CandidatePool) -> str:
    """Most frequent answer; the answer reaching the top count first wins ties."""
    counts: dict[str, int] = {}
    for candidate in pool.candidates:
        counts[candidate.answer] = counts.get(candidate.answer, 0) + 1
    top = max(counts.values())
    for candidate in pool.candidates:
        if counts[candidate.answer] == top:
            return candidate.answer
    raise AssertionError("unreachable")


def oracle_at_k(pool: CandidatePool) -> int:
    """1 iff any candidate is flagged correct."""
    return 1 if any(c.correct for c in pool.candidates) else 0


def pools_from_obj(obj: dict) -> list[CandidatePool]:
    pools = []
    for problem in obj["problems"]:
        candidates = tuple(
            Candidate(step_scores=tuple(float(s) for s in cand["step_scores"]),
                      answer=str(cand.get("answer", "")),
                      correct=bool(cand.get("correct", False)))
            for cand in problem["candidates"]
        )
        pools.append(CandidatePool(candidates))
    return pools


def load_pools(path: str) -> list[CandidatePool]:
    with open(path, "r", encoding="utf-8") as fh:
        return pools_from_obj(json.load(fh))


def evaluate_pools(pools: Sequence[CandidatePool]) -> dict[str, float]:
    if not pools:
        raise ValueError("no candidate pools")
    selected_correct = 0
    majority_correct = 0
    oracle_hits = 0
    for pool in pools:
        selected_correct += pool.candidates[bestofk_select(pool)].correct
        answer = majority_at_k(pool)
        majority_correct += any(
            c.correct and c.answer == answer for c in pool.candidates)
        oracle_hits += oracle_at_k(pool)
    n = len(pools)
    return {
        "n_problems": float(n),
        "bestofk_accuracy": selected_correct / n,
        "majority_accuracy": majority_correct / n,
        "oracle_rate": oracle_hits / n,
    }
