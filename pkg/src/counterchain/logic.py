"""Fact/expression/rule language: parsing, printing, three-valued evaluation.

Atoms are written ``[F<n>]``; connectives are ``and``, ``or``, ``xor`` and the
rule arrow ``->``. Negation is not a connective: negative information lives in
False-valued assignments. Partial states evaluate under strong Kleene
semantics (False < Unknown < True, conjunction = min, disjunction = max).
"""

from __future__ import annotations

import enum
import re
from dataclasses import dataclass
from typing import Iterator, Mapping, Union


class ExprSyntaxError(ValueError):
    """Raised on malformed expression or rule text; carries a 0-based byte offset."""

    def __init__(self, message: str, offset: int):
        super().__init__(f"{message} (offset {offset})")
        self.offset = offset


class RuleShapeError(ValueError):
    """Raised when rule text parses but fits none of the supported templates."""


class TruthValue(enum.Enum):
    FALSE = 0
    UNKNOWN = 1
    TRUE = 2

    @classmethod
    def of(cls, b: bool) -> "TruthValue":
        return cls.TRUE if b else cls.FALSE

    def __bool__(self) -> bool:
        if self is TruthValue.UNKNOWN:
            raise ValueError("Unknown has no boolean value")
        return self is TruthValue.TRUE


@dataclass(frozen=True, order=True)
class FactId:
    index: int

    def __post_init__(self):
        if self.index < 0:
            raise ValueError("fact index must be non-negative")

    def __str__(self) -> str:
        return f"[F{self.index}]"


@dataclass(frozen=True)
class Literal:
    """A fact with a definite polarity; Unknown is never a literal value."""

    fact: FactId
    value: bool

    def negated(self) -> "Literal":
        return Literal(self.fact, not self.value)

    def __str__(self) -> str:
        return f"{self.fact}={self.value}"


_LITERAL_RE = re.compile(r"^\[F(\d+)\]=(True|False)$")


def parse_literal(text: str) -> Literal:
    m = _LITERAL_RE.match(text.strip())
    if m is None:
        raise ValueError(f"malformed literal: {text!r}")
    return Literal(FactId(int(m.group(1))), m.group(2) == "True")


@dataclass(frozen=True)
class Atom:
    fact: FactId


@dataclass(frozen=True)
class And:
    left: "Expr"
    right: "Expr"


@dataclass(frozen=True)
class Or:
    left: "Expr"
    right: "Expr"


@dataclass(frozen=True)
class Xor:
    left: "Expr"
    right: "Expr"


Expr = Union[Atom, And, Or, Xor]


def expr_facts(e: Expr) -> Iterator[FactId]:
    if isinstance(e, Atom):
        yield e.fact
    else:
        yield from expr_facts(e.left)
        yield from expr_facts(e.right)


class RuleTemplate(enum.Enum):
    IMPL = "impl"            # A -> B
    AND_ANTE = "and_ante"    # (A and B) -> C
    AND_CONS = "and_cons"    # A -> (B and C)
    OR_ANTE = "or_ante"      # (A or B) -> C
    OR_CONS = "or_cons"      # A -> (B or C)
    XOR_ANTE = "xor_ante"    # (A xor B) -> C
    XOR_BARE = "xor_bare"    # A xor B


@dataclass(frozen=True)
class Implication:
    antecedent: Expr
    consequent: Expr


@dataclass(frozen=True)
class XorConstraint:
    left: FactId
    right: FactId


@dataclass(frozen=True)
class Rule:
    shape: Union[Implication, XorConstraint]
    template: RuleTemplate

    def facts(self) -> tuple[FactId, ...]:
        """Template slot facts in slot order (A, B[, C])."""
        s = self.shape
        if isinstance(s, XorConstraint):
            return (s.left, s.right)
        ante, cons = s.antecedent, s.consequent
        if self.template is RuleTemplate.IMPL:
            return (ante.fact, cons.fact)
        if self.template in (RuleTemplate.AND_ANTE, RuleTemplate.OR_ANTE,
                             RuleTemplate.XOR_ANTE):
            return (ante.left.fact, ante.right.fact, cons.fact)
        # AND_CONS / OR_CONS
        return (ante.fact, cons.left.fact, cons.right.fact)

    def __str__(self) -> str:
        return render_rule(self)


_TOKEN_RE = re.compile(
    r"\s*(?:(?P<atom>\[\[F\d+\]\]|\[F\d+\])|(?P<op>and|or|xor|->)|"
    r"(?P<lpar>\()|(?P<rpar>\)))"
)


def _tokenize(text: str) -> list[tuple[str, str, int]]:
    tokens = []
    pos = 0
    while pos < len(text):
        if text[pos].isspace():
            pos += 1
            continue
        m = _TOKEN_RE.match(text, pos)
        if m is None or m.start() != pos:
            raise ExprSyntaxError(f"unknown token {text[pos:pos + 8]!r}", pos)
        kind = m.lastgroup
        tokens.append((kind, m.group(kind), m.start(kind)))
        pos = m.end()
    return tokens


class _Parser:
    """Recursive descent; precedence: parens > xor > and > or, left-associative."""

    def __init__(self, text: str):
        self.text = text
        self.tokens = _tokenize(text)
        self.i = 0

    def peek(self) -> tuple[str, str, int] | None:
        return self.tokens[self.i] if self.i < len(self.tokens) else None

    def _offset(self) -> int:
        tok = self.peek()
        return tok[2] if tok is not None else len(self.text)

    def expect_end(self) -> None:
        if self.peek() is not None:
            raise ExprSyntaxError(f"unexpected token {self.peek()[1]!r}", self._offset())

    def parse_expr(self) -> Expr:
        return self._or()

    def _or(self) -> Expr:
        node = self._and()
        while self._eat_op("or"):
            node = Or(node, self._and())
        return node

    def _and(self) -> Expr:
        node = self._xor()
        while self._eat_op("and"):
            node = And(node, self._xor())
        return node

    def _xor(self) -> Expr:
        node = self._primary()
        while self._eat_op("xor"):
            node = Xor(node, self._primary())
        return node

    def _eat_op(self, op: str) -> bool:
        tok = self.peek()
        if tok is not None and tok[0] == "op" and tok[1] == op:
            self.i += 1
            return True
        return False

    def _primary(self) -> Expr:
        tok = self.peek()
        if tok is None:
            raise ExprSyntaxError("expected atom or '('", self._offset())
        kind, value, offset = tok
        if kind == "atom":
            self.i += 1
            # [[F<n>]] is accepted as an alias for [F<n>]
            inner = value[1:-1] if value.startswith("[[") else value
            return Atom(FactId(int(inner[2:-1])))
        if kind == "lpar":
            self.i += 1
            node = self.parse_expr()
            tok = self.peek()
            if tok is None or tok[0] != "rpar":
                raise ExprSyntaxError("unbalanced '('", self._offset())
            self.i += 1
            return node
        raise ExprSyntaxError(f"unexpected token {value!r}", offset)


def parse_expr(text: str) -> Expr:
    if not text.strip():
        raise ExprSyntaxError("empty input", 0)
    p = _Parser(text)
    node = p.parse_expr()
    p.expect_end()
    return node


def _split_arrow(text: str) -> tuple[str, str] | None:
    """Split on a top-level '->'; None when absent. Nested arrows are rejected."""
    depth = 0
    positions = []
    i = 0
    while i < len(text) - 1:
        c = text[i]
        if c == "(":
            depth += 1
        elif c == ")":
            depth -= 1
        elif c == "-" and text[i + 1] == ">" and depth == 0:
            positions.append(i)
            i += 1
        i += 1
    if not positions:
        return None
    if len(positions) > 1:
        raise RuleShapeError("unsupported rule shape: chained implication")
    p = positions[0]
    return text[:p], text[p + 2:]


def _binary_atoms(e: Expr) -> tuple[FactId, FactId] | None:
    if isinstance(e, (And, Or, Xor)) and isinstance(e.left, Atom) and isinstance(e.right, Atom):
        return (e.left.fact, e.right.fact)
    return None


def parse_rule(text: str) -> Rule:
    parts = _split_arrow(text)
    if parts is None:
        expr = parse_expr(text)
        if isinstance(expr, Xor) and _binary_atoms(expr) is not None:
            return make_rule(XorConstraint(expr.left.fact, expr.right.fact))
        raise RuleShapeError(f"unsupported rule shape: {text.strip()!r}")
    ante = parse_expr(parts[0])
    cons = parse_expr(parts[1])
    return make_rule(Implication(ante, cons))


def _classify(shape: Union[Implication, XorConstraint]) -> RuleTemplate:
    if isinstance(shape, XorConstraint):
        return RuleTemplate.XOR_BARE
    ante, cons = shape.antecedent, shape.consequent
    if isinstance(ante, Atom) and isinstance(cons, Atom):
        return RuleTemplate.IMPL
    if isinstance(cons, Atom) and _binary_atoms(ante) is not None:
        return {And: RuleTemplate.AND_ANTE, Or: RuleTemplate.OR_ANTE,
                Xor: RuleTemplate.XOR_ANTE}[type(ante)]
    if isinstance(ante, Atom) and _binary_atoms(cons) is not None:
        if isinstance(cons, And):
            return RuleTemplate.AND_CONS
        if isinstance(cons, Or):
            return RuleTemplate.OR_CONS
    raise RuleShapeError(f"unsupported rule shape: {render_expr(ante)} -> {render_expr(cons)}")


def make_rule(shape: Union[Implication, XorConstraint]) -> Rule:
    """Build a Rule, inferring its template and enforcing slot distinctness."""
    template = _classify(shape)
    rule = Rule(shape, template)
    facts = rule.facts()
    if len(set(facts)) != len(facts):
        raise RuleShapeError("rule binds the same fact to multiple slots")
    return rule


def render_expr(e: Expr) -> str:
    if isinstance(e, Atom):
        return str(e.fact)
    op = {And: "and", Or: "or", Xor: "xor"}[type(e)]
    return f"({render_expr(e.left)} {op} {render_expr(e.right)})"


def render_rule(r: Rule) -> str:
    s = r.shape
    if isinstance(s, XorConstraint):
        return f"{s.left} xor {s.right}"
    return f"{render_expr(s.antecedent)} -> {render_expr(s.consequent)}"


class StateConflictError(ValueError):
    """Raised when an assignment would silently flip an established value."""


class State:
    """Immutable three-valued assignment; unassigned facts read as Unknown."""

    __slots__ = ("_assignment",)

    def __init__(self, assignment: Mapping[FactId, bool] | None = None):
        object.__setattr__(self, "_assignment", dict(assignment or {}))

    def value_of(self, fact: FactId) -> TruthValue:
        v = self._assignment.get(fact)
        return TruthValue.UNKNOWN if v is None else TruthValue.of(v)

    def holds(self, lit: Literal) -> bool:
        return self._assignment.get(lit.fact) == lit.value

    def with_literal(self, lit: Literal, *, overwrite: bool = False) -> "State":
        """Extend with one literal. Flipping an established value requires
        overwrite=True; counterfactual recomputation is the only caller that does."""
        current = self._assignment.get(lit.fact)
        if current is not None and current != lit.value and not overwrite:
            raise StateConflictError(f"{lit.fact} is already {current}, refusing {lit.value}")
        updated = dict(self._assignment)
        updated[lit.fact] = lit.value
        return State(updated)

    def with_literals(self, lits, *, overwrite: bool = False) -> "State":
        state = self
        for lit in lits:
            state = state.with_literal(lit, overwrite=overwrite)
        return state

    def literals(self) -> tuple[Literal, ...]:
        return tuple(Literal(f, v) for f, v in sorted(self._assignment.items()))

    def facts(self) -> frozenset[FactId]:
        return frozenset(self._assignment)

    def __len__(self) -> int:
        return len(self._assignment)

    def __eq__(self, other) -> bool:
        return isinstance(other, State) and self._assignment == other._assignment

    def __repr__(self) -> str:
        inner = ", ".join(str(l) for l in self.literals())
        return f"State({inner})"


def eval_expr(e: Expr, s: State) -> TruthValue:
    """Strong Kleene evaluation over a partial state."""
    if isinstance(e, Atom):
        return s.value_of(e.fact)
    a = eval_expr(e.left, s)
    b = eval_expr(e.right, s)
    if isinstance(e, And):
        return min(a, b, key=lambda v: v.value)
    if isinstance(e, Or):
        return max(a, b, key=lambda v: v.value)
    if a is TruthValue.UNKNOWN or b is TruthValue.UNKNOWN:
        return TruthValue.UNKNOWN
    return TruthValue.of(a is not b)
