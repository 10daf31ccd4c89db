"""Correct-chain synthesis: backward goal expansion, then forward verification.

A chain grows from the target literal: pick a rule template and a sound
derivation direction that concludes it, turn that direction's premises into
subgoals, and recurse until the step budget is spent; open subgoals become
base facts. Emission is post-order, so every support is established before
its step runs. On top of the goal tree the generator weaves in:

  * side steps deriving fresh facts that nothing downstream consumes,
  * spare implication rules the chain never cites but the theory carries,
  * rules whose unused slot is bound to the conclusion of the step that will
    consume this step's own conclusion (sites for cyclic rewiring).

Every synthesized chain passes ``verify_chain`` before being returned.
"""

from __future__ import annotations

import random
from dataclasses import dataclass, field
from typing import Iterable, Optional

from .logic import (
    And,
    Atom,
    FactId,
    Implication,
    Literal,
    Or,
    Rule,
    RuleTemplate,
    State,
    TruthValue,
    Xor,
    XorConstraint,
    make_rule,
)
from .prover import (
    Status,
    Theory,
    count_models,
    entails,
    licensed_patterns,
    match_pattern,
    model_table,
    theory_for,
)


class SynthesisExhausted(RuntimeError):
    pass


@dataclass(frozen=True)
class Step:
    """One inference: supporting facts, an applied rule, and a conclusion.

    Supports list every rule fact whose value is known when the step runs,
    except the concluded fact itself; the applied pattern's premises are
    always among them.
    """

    index: int
    supports: tuple[Literal, ...]
    rule: Rule
    conclusion: Literal

    def support_facts(self) -> frozenset[FactId]:
        return frozenset(l.fact for l in self.supports)

    def content_equals(self, other: "Step") -> bool:
        """Structural equality ignoring position."""
        return (self.supports == other.supports and self.rule == other.rule
                and self.conclusion == other.conclusion)


@dataclass(frozen=True)
class CorrectChain:
    base_facts: tuple[Literal, ...]
    rules: tuple[Rule, ...]
    steps: tuple[Step, ...]
    goal: Literal

    def theory(self) -> Theory:
        facts = {l.fact for l in self.base_facts} | {self.goal.fact}
        for step in self.steps:
            facts.add(step.conclusion.fact)
            facts.update(step.support_facts())
        return theory_for(self.rules, facts)

    def base_state(self) -> State:
        return State({l.fact: l.value for l in self.base_facts})

    def state_before(self, index: int) -> State:
        """Prefix state: base facts plus conclusions of steps before ``index``."""
        state = self.base_state()
        for step in self.steps[: index - 1]:
            state = state.with_literal(step.conclusion)
        return state

    def final_state(self) -> State:
        return self.state_before(len(self.steps) + 1)


def step_supports(rule: Rule, conclusion_fact: FactId, state: State) -> tuple[Literal, ...]:
    """Known rule facts, in slot order, excluding the concluded fact."""
    out = []
    for fact in rule.facts():
        if fact == conclusion_fact:
            continue
        value = state.value_of(fact)
        if value is not TruthValue.UNKNOWN:
            out.append(Literal(fact, bool(value)))
    return tuple(out)


@dataclass(frozen=True)
class SynthesisConfig:
    step_count: tuple[int, int] = (7, 10)
    template_weights: tuple[tuple[RuleTemplate, float], ...] = (
        (RuleTemplate.IMPL, 2.0),
        (RuleTemplate.AND_ANTE, 2.0),
        (RuleTemplate.AND_CONS, 2.0),
        (RuleTemplate.OR_ANTE, 2.0),
        (RuleTemplate.OR_CONS, 2.0),
        (RuleTemplate.XOR_ANTE, 2.0),
        (RuleTemplate.XOR_BARE, 3.0),
    )
    max_facts: int = 16
    max_attempts: int = 64
    p_fresh: float = 0.7
    min_useful_steps: int = 3
    side_steps: tuple[int, int] = (1, 3)
    spare_impl_rules: int = 2
    p_cycle_slot: float = 0.5
    distractor_rules: int = 0

    def __post_init__(self):
        lo, hi = self.step_count
        if not (3 <= lo <= hi <= 12):
            raise ValueError("step_count range must lie within [3, 12]")
        if not self.template_weights:
            raise ValueError("template_weights must be non-empty")


@dataclass(frozen=True)
class _Shape:
    """A derivation direction as seen from generation: concluded slot/value,
    premised slot/value pairs, remaining slots free."""

    template: RuleTemplate
    premises: tuple[tuple[int, bool], ...]
    derived: tuple[int, bool]

    def arity(self) -> int:
        return 2 if self.template in (RuleTemplate.IMPL, RuleTemplate.XOR_BARE) else 3

    def passive_slots(self) -> tuple[int, ...]:
        used = {self.derived[0], *(i for i, _ in self.premises)}
        return tuple(i for i in range(self.arity()) if i not in used)


_SHAPES_TRUE: tuple[_Shape, ...] = (
    _Shape(RuleTemplate.IMPL, ((0, True),), (1, True)),
    _Shape(RuleTemplate.XOR_BARE, ((0, False),), (1, True)),
    _Shape(RuleTemplate.AND_ANTE, ((0, True), (1, True)), (2, True)),
    _Shape(RuleTemplate.AND_CONS, ((0, True),), (1, True)),
    _Shape(RuleTemplate.OR_ANTE, ((0, True),), (2, True)),
    _Shape(RuleTemplate.OR_CONS, ((0, True), (1, False)), (2, True)),
    _Shape(RuleTemplate.XOR_ANTE, ((2, False), (1, True)), (0, True)),
    _Shape(RuleTemplate.XOR_ANTE, ((0, True), (1, False)), (2, True)),
)

_SHAPES_FALSE: tuple[_Shape, ...] = (
    _Shape(RuleTemplate.IMPL, ((1, False),), (0, False)),
    _Shape(RuleTemplate.XOR_BARE, ((0, True),), (1, False)),
    _Shape(RuleTemplate.AND_ANTE, ((2, False), (0, True)), (1, False)),
    _Shape(RuleTemplate.AND_CONS, ((1, False),), (0, False)),
    _Shape(RuleTemplate.OR_ANTE, ((2, False),), (0, False)),
    _Shape(RuleTemplate.OR_CONS, ((1, False), (2, False)), (0, False)),
    _Shape(RuleTemplate.XOR_ANTE, ((2, False), (1, False)), (0, False)),
)


def _build_rule(template: RuleTemplate, slots: list[FactId]) -> Rule:
    a = [Atom(f) for f in slots]
    if template is RuleTemplate.IMPL:
        return make_rule(Implication(a[0], a[1]))
    if template is RuleTemplate.XOR_BARE:
        return make_rule(XorConstraint(slots[0], slots[1]))
    if template is RuleTemplate.AND_ANTE:
        return make_rule(Implication(And(a[0], a[1]), a[2]))
    if template is RuleTemplate.AND_CONS:
        return make_rule(Implication(a[0], And(a[1], a[2])))
    if template is RuleTemplate.OR_ANTE:
        return make_rule(Implication(Or(a[0], a[1]), a[2]))
    if template is RuleTemplate.OR_CONS:
        return make_rule(Implication(a[0], Or(a[1], a[2])))
    return make_rule(Implication(Xor(a[0], a[1]), a[2]))


@dataclass
class _Node:
    rule: Rule
    conclusion: Literal
    children: list["_Node"] = field(default_factory=list)


class _OutOfFacts(Exception):
    pass


class _Retry(Exception):
    pass


class _Builder:
    def __init__(self, cfg: SynthesisConfig, rng: random.Random):
        self.cfg = cfg
        self.rng = rng
        self.next_fact = 0
        self.intended: dict[FactId, bool] = {}
        self.leaves: list[Literal] = []
        self.rules: list[Rule] = []
        self.rule_keys: set[tuple] = set()

    def fresh_fact(self, value: Optional[bool]) -> FactId:
        if self.next_fact >= self.cfg.max_facts:
            raise _OutOfFacts()
        fact = FactId(self.next_fact)
        self.next_fact += 1
        if value is not None:
            self.intended[fact] = value
        return fact

    def budget_left(self) -> int:
        return self.cfg.max_facts - self.next_fact

    def add_rule(self, rule: Rule) -> bool:
        key = frozenset(rule.facts())
        if key in self.rule_keys:
            return False
        self.rule_keys.add(key)
        self.rules.append(rule)
        return True

    def make_leaf(self, value: bool, taken: set[FactId]) -> Literal:
        reusable = [l for l in self.leaves if l.value == value and l.fact not in taken]
        if reusable and (self.rng.random() > self.cfg.p_fresh or self.budget_left() <= 0):
            return self.rng.choice(reusable)
        lit = Literal(self.fresh_fact(value), value)
        self.leaves.append(lit)
        return lit

    def pick_shape(self, value: bool) -> _Shape:
        shapes = _SHAPES_TRUE if value else _SHAPES_FALSE
        weights = dict(self.cfg.template_weights)
        pool = [s for s in shapes if weights.get(s.template, 0.0) > 0.0]
        if not pool:
            raise ValueError("no template with positive weight fits the subgoal")
        return self.rng.choices(pool, weights=[weights[s.template] for s in pool], k=1)[0]

    def _bind_passive(self, shape: _Shape, goal: Literal,
                      parent: Optional[Literal], taken: set[FactId]) -> FactId:
        # a slot the rule constrains (given this step's intended values) may
        # only take a fact of the forced value, or a fresh one
        forced: Optional[bool] = None
        if shape.template is RuleTemplate.AND_CONS and shape.derived[1]:
            forced = True
        if shape.template is RuleTemplate.OR_ANTE and not shape.derived[1]:
            forced = False

        if (parent is not None and parent.fact not in taken
                and (forced is None or forced == parent.value)
                and self.rng.random() < self.cfg.p_cycle_slot):
            return parent.fact

        pool = [f for f, v in self.intended.items()
                if f not in taken and (forced is None or v == forced)]
        if pool and (self.rng.random() < 0.5 or self.budget_left() <= 0):
            return self.rng.choice(pool)
        return self.fresh_fact(forced)

    def expand(self, goal: Literal, budget: int,
               parent: Optional[Literal]) -> tuple[_Node, int]:
        """Create the step concluding ``goal``; returns (node, steps spent)."""
        rng = self.rng
        shape = self.pick_shape(goal.value)
        slots: list[Optional[FactId]] = [None] * shape.arity()
        slots[shape.derived[0]] = goal.fact
        taken = {goal.fact}

        remaining = budget - 1
        order = list(range(len(shape.premises)))
        rng.shuffle(order)
        expand_flags = [False] * len(shape.premises)
        for pos, i in enumerate(order):
            if remaining > 0 and (pos == len(order) - 1 or rng.random() < 0.35):
                expand_flags[i] = True

        children: list[_Node] = []
        for i, (slot, value) in enumerate(shape.premises):
            if expand_flags[i] and remaining > 0:
                fact = self.fresh_fact(value)
                lit = Literal(fact, value)
                slots[slot] = fact
                taken.add(fact)
                node, used = self.expand(lit, remaining, goal)
                remaining -= used
                children.append(node)
            else:
                lit = self.make_leaf(value, taken)
                slots[slot] = lit.fact
                taken.add(lit.fact)

        for slot in shape.passive_slots():
            fact = self._bind_passive(shape, goal, parent, taken)
            slots[slot] = fact
            taken.add(fact)

        rule = _build_rule(shape.template, slots)  # type: ignore[arg-type]
        if not self.add_rule(rule):
            raise _Retry()
        return _Node(rule, goal, children), budget - remaining


def _emit(node: _Node, rng: random.Random, out: list[_Node]) -> None:
    children = list(node.children)
    rng.shuffle(children)
    for child in children:
        _emit(child, rng, out)
    out.append(node)


# weights favour the shapes that admit the scarcer corruption kinds
_SIDE_FLAVORS: tuple[tuple[str, float], ...] = (
    ("xor_bare", 3.0),
    ("xor_ante_bwd", 2.0),
    ("or_cons_fwd", 2.5),
    ("and_ante_bwd", 2.0),
    ("and_cons_bwd", 1.5),
    ("impl_fwd", 1.5),
    ("impl_bwd", 1.0),
    ("and_cons_fwd", 1.0),
    ("or_ante_fwd", 1.0),
    ("xor_ante_fwd", 1.0),
)


def _side_step(builder: _Builder, state: State,
               ahead: set[FactId]) -> Optional[tuple[Rule, Literal]]:
    """One step over established facts whose fresh conclusion nothing consumes.

    ``ahead`` holds the facts later steps mention; corruption targets picked
    outside it stay inert downstream, so those are preferred.
    """
    rng = builder.rng
    known = [(f, bool(state.value_of(f))) for f in sorted(state.facts())]
    if not known or builder.budget_left() <= 0:
        return None
    trues = [f for f, v in known if v]
    falses = [f for f, v in known if not v]
    retired_t = [f for f in trues if f not in ahead]
    retired_f = [f for f in falses if f not in ahead]

    feasible = {"xor_bare"}
    if trues:
        feasible |= {"impl_fwd", "and_cons_fwd", "or_ante_fwd"}
    if falses:
        feasible |= {"impl_bwd", "xor_ante_bwd", "and_cons_bwd"}
    if trues and falses:
        feasible |= {"or_cons_fwd", "and_ante_bwd", "xor_ante_fwd"}

    pool = [(f, w) for f, w in _SIDE_FLAVORS if f in feasible]
    order = []
    remaining = list(pool)
    while remaining:
        weights = [w for _, w in remaining]
        pick = rng.choices(range(len(remaining)), weights=weights, k=1)[0]
        order.append(remaining.pop(pick)[0])

    for flavor in order:
        made = _make_side(builder, flavor, trues, falses, known,
                          retired_t or trues, retired_f or falses)
        if made is not None:
            return made
    return None


def _make_side(builder: _Builder, flavor: str, trues: list[FactId],
               falses: list[FactId], known: list[tuple[FactId, bool]],
               retired_t: list[FactId], retired_f: list[FactId],
               ) -> Optional[tuple[Rule, Literal]]:
    rng = builder.rng
    if flavor == "xor_bare":
        # prefer a true source: its corruption sites are scarcer
        if trues and (not falses or rng.random() < 0.7):
            x, v = rng.choice(trues), True
        else:
            x, v = rng.choice(falses), False
        y = builder.fresh_fact(not v)
        rule, concl = _build_rule(RuleTemplate.XOR_BARE, [x, y]), Literal(y, not v)
    elif flavor == "impl_fwd":
        x = rng.choice(trues)
        y = builder.fresh_fact(True)
        rule, concl = _build_rule(RuleTemplate.IMPL, [x, y]), Literal(y, True)
    elif flavor == "impl_bwd":
        x = rng.choice(falses)
        y = builder.fresh_fact(False)
        rule, concl = _build_rule(RuleTemplate.IMPL, [y, x]), Literal(y, False)
    elif flavor == "or_cons_fwd":
        x, b = rng.choice(trues), rng.choice(retired_f)
        if x == b:
            return None
        y = builder.fresh_fact(True)
        rule, concl = _build_rule(RuleTemplate.OR_CONS, [x, b, y]), Literal(y, True)
    elif flavor == "and_ante_bwd":
        a, c = rng.choice(retired_t), rng.choice(falses)
        if a == c:
            return None
        y = builder.fresh_fact(False)
        rule, concl = _build_rule(RuleTemplate.AND_ANTE, [a, y, c]), Literal(y, False)
    elif flavor == "and_cons_fwd":
        pool = [f for f in trues]
        x = rng.choice(pool)
        others = [f for f in trues if f != x]
        if not others:
            return None
        z = rng.choice(others)
        y = builder.fresh_fact(True)
        rule, concl = _build_rule(RuleTemplate.AND_CONS, [x, y, z]), Literal(y, True)
    elif flavor == "or_ante_fwd":
        x = rng.choice(trues)
        pool = [f for f, _ in known if f != x]
        if not pool:
            return None
        b = rng.choice(pool)
        y = builder.fresh_fact(True)
        rule, concl = _build_rule(RuleTemplate.OR_ANTE, [x, b, y]), Literal(y, True)
    elif flavor == "and_cons_bwd":
        b = rng.choice(falses)
        pool = [f for f, _ in known if f != b]
        if not pool:
            return None
        x = rng.choice(pool)
        y = builder.fresh_fact(False)
        rule, concl = _build_rule(RuleTemplate.AND_CONS, [y, b, x]), Literal(y, False)
    elif flavor == "xor_ante_bwd":
        c = rng.choice(falses)
        pool = [(f, v) for f, v in known if f != c]
        true_pool = [(f, v) for f, v in pool if v]
        if true_pool and rng.random() < 0.7:
            pool = true_pool
        if not pool:
            return None
        b, w = rng.choice(pool)
        y = builder.fresh_fact(w)
        rule, concl = _build_rule(RuleTemplate.XOR_ANTE, [y, b, c]), Literal(y, w)
    else:  # xor_ante_fwd
        x, b = rng.choice(trues), rng.choice(falses)
        y = builder.fresh_fact(True)
        rule, concl = _build_rule(RuleTemplate.XOR_ANTE, [x, b, y]), Literal(y, True)

    if len(set(rule.facts())) != len(rule.facts()) or not builder.add_rule(rule):
        return None
    return rule, concl


def _plant_spare_impls(builder: _Builder, state: State, count: int) -> None:
    """Implication rules no step cites, satisfied by the intended model: a
    true consequent under an unassigned antecedent, and a false antecedent
    paired with a true consequent."""
    rng = builder.rng
    trues = [f for f in sorted(state.facts()) if state.value_of(f) is TruthValue.TRUE]
    falses = [f for f in sorted(state.facts()) if state.value_of(f) is TruthValue.FALSE]
    for i in range(count):
        if i % 2 == 0 and trues and builder.budget_left() > 0:
            x = rng.choice(trues)
            y = builder.fresh_fact(None)
            builder.add_rule(_build_rule(RuleTemplate.IMPL, [y, x]))
        elif falses and trues:
            a, b = rng.choice(falses), rng.choice(trues)
            builder.add_rule(_build_rule(RuleTemplate.IMPL, [a, b]))


def min_derivation_cost(rules: Iterable[Rule], base: Iterable[Literal],
                        goal: Literal) -> Optional[int]:
    """Fewest pattern applications deriving ``goal`` from ``base``, or None
    when the catalog cannot reach it."""
    INF = 10 ** 9
    cost: dict[Literal, int] = {lit: 0 for lit in base}
    rules = tuple(rules)
    changed = True
    while changed:
        changed = False
        for rule in rules:
            for pattern in licensed_patterns(rule):
                premises = pattern.bind_premises(rule)
                if any(p not in cost for p in premises):
                    continue
                c = 1 + sum(cost[p] for p in premises)
                derived = pattern.bind_derived(rule)
                if cost.get(derived, INF) > c:
                    cost[derived] = c
                    changed = True
    return cost.get(goal)


def _try_build(cfg: SynthesisConfig, rng: random.Random) -> Optional[CorrectChain]:
    total = rng.randint(*cfg.step_count)
    planned_side = min(rng.randint(*cfg.side_steps),
                       total - max(cfg.min_useful_steps + 1, 4))
    planned_side = max(planned_side, 0)
    builder = _Builder(cfg, rng)
    goal_value = rng.random() < 0.5
    goal = Literal(builder.fresh_fact(goal_value), goal_value)

    root, spent = builder.expand(goal, total - planned_side, None)
    if spent < max(cfg.min_useful_steps, 3):
        return None

    nodes: list[_Node] = []
    _emit(root, rng, nodes)

    # schedule: backbone in post-order with side steps spliced in (never in
    # the first two positions)
    tokens: list[Optional[_Node]] = list(nodes)
    for _ in range(total - spent):
        tokens.insert(rng.randint(2, len(tokens)), None)

    sequence: list[tuple[Rule, Literal, tuple[Literal, ...]]] = []
    state = State({l.fact: l.value for l in builder.leaves})
    for pos, token in enumerate(tokens):
        if token is None:
            ahead: set[FactId] = set()
            for later in tokens[pos + 1:]:
                if later is not None:
                    ahead.update(later.rule.facts())
            made = _side_step(builder, state, ahead)
            if made is None:
                return None
            rule, concl = made
        else:
            rule, concl = token.rule, token.conclusion
        supports = step_supports(rule, concl.fact, state)
        sequence.append((rule, concl, supports))
        state = state.with_literal(concl)

    if len(sequence) != total:
        return None

    _plant_spare_impls(builder, state, cfg.spare_impl_rules)
    if cfg.distractor_rules:
        trues = [f for f in sorted(state.facts()) if state.value_of(f) is TruthValue.TRUE]
        falses = [f for f in sorted(state.facts()) if state.value_of(f) is TruthValue.FALSE]
        for _ in range(cfg.distractor_rules):
            if falses and trues:
                builder.add_rule(_build_rule(
                    RuleTemplate.IMPL, [rng.choice(falses), rng.choice(trues)]))

    steps = tuple(Step(i + 1, supports, rule, concl)
                  for i, (rule, concl, supports) in enumerate(sequence))
    chain = CorrectChain(base_facts=tuple(builder.leaves), rules=tuple(builder.rules),
                         steps=steps, goal=goal)
    if len(chain.theory().universe) > cfg.max_facts:
        return None
    cost = min_derivation_cost(chain.rules, chain.base_facts, goal)
    if cost is None or cost < cfg.min_useful_steps:
        return None
    if not verify_chain(chain).valid:
        return None
    if entails(chain.theory(), chain.base_state(), chain.goal).status is not Status.ENTAILED:
        return None
    return chain


def synthesize_chain(cfg: SynthesisConfig, seed: int) -> CorrectChain:
    """Deterministic in (cfg, seed); rejection-samples until every invariant holds."""
    rng = random.Random(seed)
    for _ in range(cfg.max_attempts):
        try:
            chain = _try_build(cfg, rng)
        except (_OutOfFacts, _Retry, RecursionError):
            chain = None
        if chain is not None:
            return chain
    raise SynthesisExhausted(
        f"no valid chain after {cfg.max_attempts} attempts (seed {seed})")


@dataclass(frozen=True)
class StepCheck:
    index: int
    semantic: bool
    procedural: bool
    pattern: bool
    fresh_conclusion: bool

    @property
    def ok(self) -> bool:
        return self.semantic and self.procedural and self.pattern and self.fresh_conclusion


@dataclass(frozen=True)
class ChainReport:
    valid: bool
    failures: tuple[str, ...]
    step_checks: tuple[StepCheck, ...]


def check_step_local(theory: Theory, state: State, established: set[Literal],
                     step: Step, *, semantic: bool = True) -> StepCheck:
    """Validity of one step against an explicit prefix.

    procedural: every support is a base fact or an earlier conclusion;
    pattern:    (supports, conclusion) instantiates a licensed direction and
                mentions only rule facts;
    fresh:      the concluded fact is not already assigned;
    semantic:   supports and conclusion are entailed by (theory, prefix).
    """
    rule_facts = set(step.rule.facts())
    procedural = all(lit in established for lit in step.supports)
    in_rule = (step.support_facts() <= rule_facts
               and step.conclusion.fact in rule_facts
               and step.conclusion.fact not in step.support_facts())
    pattern = in_rule and match_pattern(step.rule, step.supports, step.conclusion) is not None
    fresh = state.value_of(step.conclusion.fact) is TruthValue.UNKNOWN

    sem = True
    if semantic:
        table = model_table(theory)
        rows = table.restrict_state(state)
        for lit in (*step.supports, step.conclusion):
            if state.holds(lit):
                continue
            if table.decide(rows, lit).status is not Status.ENTAILED:
                sem = False
                break
    return StepCheck(step.index, sem, procedural, pattern, fresh)


def check_step_semantic(theory: Theory, prefix_state: State, step: Step) -> bool:
    """True iff every support and the conclusion are entailed by the prefix.

    Structural defects (unestablished supports, unlicensed direction) are out
    of scope here. An inconsistent prefix is an upstream synthesis bug and
    raises rather than returning a verdict.
    """
    from .prover import InconsistentPrefixError

    table = model_table(theory)
    rows = table.restrict_state(prefix_state)
    if rows.size == 0:
        raise InconsistentPrefixError("prefix state contradicts the theory")
    for lit in (*step.supports, step.conclusion):
        if prefix_state.holds(lit):
            continue
        if table.decide(rows, lit).status is not Status.ENTAILED:
            return False
    return True


def verify_chain(chain: CorrectChain) -> ChainReport:
    failures: list[str] = []
    try:
        theory = chain.theory()
    except Exception as exc:  # noqa: BLE001 - report, don't raise
        return ChainReport(False, (f"theory: {exc}",), ())

    base_state = chain.base_state()
    if len(base_state) != len(chain.base_facts):
        failures.append("base facts assign some fact twice")
    if count_models(theory, base_state) == 0:
        failures.append("base facts are inconsistent with the rules")
        return ChainReport(False, tuple(failures), ())

    rule_set = set(chain.rules)
    state = base_state
    established: set[Literal] = set(chain.base_facts)
    checks: list[StepCheck] = []
    for step in chain.steps:
        if step.rule not in rule_set:
            failures.append(f"step {step.index}: rule not in the chain's rule list")
        check = check_step_local(theory, state, established, step)
        checks.append(check)
        if not check.procedural:
            failures.append(f"step {step.index}: support not established")
        if not check.pattern:
            failures.append(f"step {step.index}: no licensed pattern matches")
        if not check.fresh_conclusion:
            failures.append(f"step {step.index}: fact concluded twice")
        if not check.semantic:
            failures.append(f"step {step.index}: not entailed by prefix")
        if check.fresh_conclusion:
            state = state.with_literal(step.conclusion)
            established.add(step.conclusion)

    try:
        topological_order(chain)
    except ValueError:
        failures.append("dependency cycle")

    if not chain.steps or chain.steps[-1].conclusion != chain.goal:
        failures.append("final step does not conclude the goal")
    if count_models(theory, state) == 0:
        failures.append("established facts are inconsistent with the rules")

    return ChainReport(not failures, tuple(failures), tuple(checks))


def topological_order(chain: CorrectChain) -> list[int]:
    """Dependency-respecting 1-based step order, stable on original index."""
    concluded_by = {s.conclusion: s.index for s in chain.steps}
    deps: dict[int, set[int]] = {s.index: set() for s in chain.steps}
    for step in chain.steps:
        for lit in step.supports:
            src = concluded_by.get(lit)
            if src is not None and src != step.index:
                deps[step.index].add(src)
    order: list[int] = []
    done: set[int] = set()
    pending = sorted(deps)
    while pending:
        ready = [i for i in pending if deps[i] <= done]
        if not ready:
            raise ValueError("cycle detected among steps")
        nxt = ready[0]
        order.append(nxt)
        done.add(nxt)
        pending.remove(nxt)
    return order
