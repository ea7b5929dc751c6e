"""Formula language: abstract syntax, parser, printer and checker.

Concrete syntax (whitespace-insensitive, ``&`` left-associative, ``!``
binds tightest, atoms always quoted)::

    state  := "true" | '"' name '"' | "!" state | state "&" state
            | "(" state ")"
            | probop cmp number "[" path "]"
            | expop  cmp number "[" state "]"
    probop := "P" | "LP" | "UP"
    expop  := "E" | "LE" | "UE"
    cmp    := "<" | "<=" | "=" | ">=" | ">"
    path   := "X" state | state "U" state
            | state "U<=" int state | state "UR<=" int state

``P``/``E`` compare a precise value against the threshold, ``LP``/``LE``
the lower bound and ``UP``/``UE`` the upper bound.  ``U<=`` bounds the
number of steps, ``UR<=`` the cumulative reward spent.
"""

from __future__ import annotations

import re
import warnings
from dataclasses import dataclass

import numpy as np

from . import inference
from .errors import (
    FormulaSyntaxError,
    HorizonExceededError,
    PreciseQueryError,
)
from .inference import Mode

COMPARATORS = ("<", "<=", "=", ">=", ">")

PROB_OPS = {"P": "precise", "LP": "lower", "UP": "upper"}
EXP_OPS = {"E": "precise", "LE": "lower", "UE": "upper"}
_PROB_NAMES = {v: k for k, v in PROB_OPS.items()}
_EXP_NAMES = {v: k for k, v in EXP_OPS.items()}


# ---------------------------------------------------------------------------
# abstract syntax


class StateFormula:
    pass


class PathFormula:
    pass


@dataclass(frozen=True)
class TrueFormula(StateFormula):
    pass


#: Shared instance of the trivially satisfied formula.
TRUE = TrueFormula()


@dataclass(frozen=True)
class Atom(StateFormula):
    name: str


@dataclass(frozen=True)
class Not(StateFormula):
    operand: StateFormula


@dataclass(frozen=True)
class And(StateFormula):
    left: StateFormula
    right: StateFormula


@dataclass(frozen=True)
class Prob(StateFormula):
    """Threshold on the probability of a path formula.

    ``kind`` selects the bound: ``precise``, ``lower`` or ``upper``.
    """

    kind: str
    cmp: str
    bound: float
    path: PathFormula


@dataclass(frozen=True)
class ExpReward(StateFormula):
    """Threshold on the expected reward spent until reaching ``operand``."""

    kind: str
    cmp: str
    bound: int
    operand: StateFormula


@dataclass(frozen=True)
class Next(PathFormula):
    operand: StateFormula


@dataclass(frozen=True)
class Until(PathFormula):
    left: StateFormula
    right: StateFormula


@dataclass(frozen=True)
class BoundedUntil(PathFormula):
    left: StateFormula
    right: StateFormula
    steps: int


@dataclass(frozen=True)
class BoundedReward(PathFormula):
    left: StateFormula
    right: StateFormula
    budget: int


# ---------------------------------------------------------------------------
# tokenizer

_TOKEN_RE = re.compile(
    r"""
    (?P<ws>\s+)
  | (?P<string>"[A-Za-z_][A-Za-z0-9_]*")
  | (?P<number>\d+(?:\.\d+)?(?:[eE][+-]?\d+)?)
  | (?P<cmp><=|>=|<|>|=)
  | (?P<word>[A-Za-z]+)
  | (?P<sym>[!&()\[\]])
    """,
    re.VERBOSE,
)


def _tokenize(text):
    tokens = []
    pos = 0
    while pos < len(text):
        m = _TOKEN_RE.match(text, pos)
        if m is None:
            raise FormulaSyntaxError(pos, "a valid token", text[pos])
        pos = m.end()
        kind = m.lastgroup
        if kind == "ws":
            continue
        tokens.append((kind, m.group(), m.start()))
    tokens.append(("eof", "", len(text)))
    return tokens


class _Parser:
    def __init__(self, text):
        self.text = text
        self.tokens = _tokenize(text)
        self.pos = 0

    def peek(self):
        return self.tokens[self.pos]

    def advance(self):
        tok = self.tokens[self.pos]
        self.pos += 1
        return tok

    def fail(self, expected):
        kind, value, start = self.peek()
        found = value if kind != "eof" else "end of input"
        raise FormulaSyntaxError(start, expected, found)

    def expect(self, kind, value=None, expected=None):
        tok_kind, tok_value, _ = self.peek()
        if tok_kind != kind or (value is not None and tok_value != value):
            self.fail(expected or (value or kind))
        return self.advance()

    # grammar ---------------------------------------------------------

    def parse(self) -> StateFormula:
        formula = self.state()
        if self.peek()[0] != "eof":
            self.fail("end of input")
        return formula

    def state(self) -> StateFormula:
        left = self.unary()
        while self.peek()[:2] == ("sym", "&"):
            self.advance()
            left = And(left, self.unary())
        return left

    def unary(self) -> StateFormula:
        if self.peek()[:2] == ("sym", "!"):
            self.advance()
            return Not(self.unary())
        return self.primary()

    def primary(self) -> StateFormula:
        kind, value, start = self.peek()
        if kind == "string":
            self.advance()
            return Atom(value[1:-1])
        if kind == "sym" and value == "(":
            self.advance()
            inner = self.state()
            self.expect("sym", ")")
            return inner
        if kind == "word":
            if value == "true":
                self.advance()
                return TRUE
            if value in PROB_OPS:
                self.advance()
                return self.prob_tail(PROB_OPS[value], start)
            if value in EXP_OPS:
                self.advance()
                return self.exp_tail(EXP_OPS[value], start)
        self.fail("a state formula")

    def comparator(self) -> str:
        return self.expect("cmp", expected="a comparator")[1]

    def number(self):
        tok = self.expect("number", expected="a number")
        return tok

    def integer(self) -> int:
        _, value, start = self.number()
        if "." in value or "e" in value or "E" in value:
            raise FormulaSyntaxError(start, "an integer", value)
        return int(value)

    def prob_tail(self, kind, start) -> Prob:
        cmp = self.comparator()
        _, value, num_start = self.number()
        bound = float(value)
        if not 0.0 <= bound <= 1.0:
            raise FormulaSyntaxError(num_start, "a probability in [0, 1]", value)
        self.expect("sym", "[")
        path = self.path()
        self.expect("sym", "]")
        return Prob(kind, cmp, bound, path)

    def exp_tail(self, kind, start) -> ExpReward:
        cmp = self.comparator()
        bound = self.integer()
        self.expect("sym", "[")
        operand = self.state()
        self.expect("sym", "]")
        return ExpReward(kind, cmp, bound, operand)

    def path(self) -> PathFormula:
        if self.peek()[:2] == ("word", "X"):
            self.advance()
            return Next(self.state())
        left = self.state()
        kind, value, _ = self.peek()
        if (kind, value) == ("word", "U"):
            self.advance()
            if self.peek()[:2] == ("cmp", "<="):
                self.advance()
                steps = self.integer()
                return BoundedUntil(left, self.state(), steps)
            return Until(left, self.state())
        if (kind, value) == ("word", "UR"):
            self.advance()
            self.expect("cmp", "<=", expected='"<=" after UR')
            budget = self.integer()
            return BoundedReward(left, self.state(), budget)
        self.fail("a path operator (U, U<=, UR<= or X)")


def parse_formula(text: str) -> StateFormula:
    """Parse formula text into its abstract syntax tree."""
    return _Parser(text).parse()


# ---------------------------------------------------------------------------
# printer


def _fmt_number(value) -> str:
    if isinstance(value, int):
        return str(value)
    return repr(float(value))


def format_formula(formula) -> str:
    """Canonical text for a formula; ``parse_formula`` inverts it exactly."""
    if isinstance(formula, TrueFormula):
        return "true"
    if isinstance(formula, Atom):
        return f'"{formula.name}"'
    if isinstance(formula, Not):
        inner = format_formula(formula.operand)
        if isinstance(formula.operand, And):
            inner = f"({inner})"
        return f"!{inner}"
    if isinstance(formula, And):
        left = format_formula(formula.left)
        right = format_formula(formula.right)
        if isinstance(formula.right, And):  # keep left associativity
            right = f"({right})"
        return f"{left} & {right}"
    if isinstance(formula, Prob):
        op = _PROB_NAMES[formula.kind]
        return f"{op}{formula.cmp}{_fmt_number(formula.bound)} [ {format_formula(formula.path)} ]"
    if isinstance(formula, ExpReward):
        op = _EXP_NAMES[formula.kind]
        return f"{op}{formula.cmp}{formula.bound} [ {format_formula(formula.operand)} ]"
    if isinstance(formula, Next):
        return f"X {format_formula(formula.operand)}"
    if isinstance(formula, Until):
        return f"{format_formula(formula.left)} U {format_formula(formula.right)}"
    if isinstance(formula, BoundedUntil):
        return (
            f"{format_formula(formula.left)} U<={formula.steps} "
            f"{format_formula(formula.right)}"
        )
    if isinstance(formula, BoundedReward):
        return (
            f"{format_formula(formula.left)} UR<={formula.budget} "
            f"{format_formula(formula.right)}"
        )
    raise TypeError(f"not a formula: {formula!r}")


# ---------------------------------------------------------------------------
# checker


def compare(value: float, cmp: str, bound: float, tolerance: float = 1e-9) -> bool:
    """Threshold comparison; values within ``tolerance`` count as equal."""
    equal = abs(value - bound) <= tolerance
    if cmp == "=":
        return equal
    if cmp == "<":
        return value < bound and not equal
    if cmp == "<=":
        return value < bound or equal
    if cmp == ">":
        return value > bound and not equal
    if cmp == ">=":
        return value > bound or equal
    raise ValueError(f"unknown comparator {cmp!r}")


def _mode_for(kind: str, model) -> Mode:
    if kind == "precise":
        if not model.is_precise:
            raise PreciseQueryError(
                "precise-kind operator on an imprecise model; use the "
                "lower/upper variant"
            )
        return Mode.PRECISE
    return Mode.LOWER if kind == "lower" else Mode.UPPER


def evaluate_path(model, path: PathFormula, mode: Mode,
                  tolerance: float = 1e-9, paper_literal: bool = False) -> np.ndarray:
    """Per-state value of a path formula under the given mode."""
    if isinstance(path, Next):
        phi = _sat_mask(model, path.operand, tolerance, paper_literal)
        return inference.next_step_probability(model, phi, mode)
    if isinstance(path, (Until, BoundedUntil)):
        steps = model.horizon if isinstance(path, Until) else path.steps
        if steps > model.horizon:
            raise HorizonExceededError(
                f"step bound {steps} exceeds the model horizon {model.horizon}"
            )
        phi1 = _sat_mask(model, path.left, tolerance, paper_literal)
        phi2 = _sat_mask(model, path.right, tolerance, paper_literal)
        return inference.conditional_hitting(model, phi1, phi2, steps, mode)
    if isinstance(path, BoundedReward):
        phi1 = _sat_mask(model, path.left, tolerance, paper_literal)
        phi2 = _sat_mask(model, path.right, tolerance, paper_literal)
        table = inference.bounded_reward_probabilities(
            model, phi1, phi2, model.horizon, path.budget, mode,
            paper_literal=paper_literal,
        )
        return table.at_budget(path.budget)
    raise TypeError(f"not a path formula: {path!r}")


def evaluate_reward(model, operand: StateFormula, mode: Mode,
                    tolerance: float = 1e-9, paper_literal: bool = False) -> np.ndarray:
    """Expected cumulative reward until ``operand`` holds, at the model horizon."""
    phi = _sat_mask(model, operand, tolerance, paper_literal)
    return inference.expected_cumulative_reward(model, phi, model.horizon, mode)


def _threshold_mask(model, formula, tolerance, paper_literal):
    mode = _mode_for(formula.kind, model)
    if formula.cmp == "=" and formula.kind != "precise" and not model.is_precise:
        warnings.warn(
            "equality threshold on a lower/upper bound of an imprecise model; "
            "the bound is a single real, but equality rarely means the "
            "quantity itself is determined",
            stacklevel=3,
        )
    if isinstance(formula, Prob):
        values = evaluate_path(model, formula.path, mode, tolerance, paper_literal)
    else:
        values = evaluate_reward(model, formula.operand, mode, tolerance,
                                 paper_literal)
    return np.array(
        [compare(v, formula.cmp, formula.bound, tolerance) for v in values],
        dtype=bool,
    )


def _sat_mask(model, formula, tolerance, paper_literal) -> np.ndarray:
    if isinstance(formula, TrueFormula):
        return np.ones(len(model.space), dtype=bool)
    if isinstance(formula, Atom):
        return model.label_mask(formula.name)
    if isinstance(formula, Not):
        return ~_sat_mask(model, formula.operand, tolerance, paper_literal)
    if isinstance(formula, And):
        return _sat_mask(model, formula.left, tolerance, paper_literal) & _sat_mask(
            model, formula.right, tolerance, paper_literal
        )
    if isinstance(formula, (Prob, ExpReward)):
        return _threshold_mask(model, formula, tolerance, paper_literal)
    raise TypeError(f"not a state formula: {formula!r}")


def sat_set(model, formula, tolerance: float = 1e-9,
            paper_literal: bool = False) -> frozenset:
    """States of the model satisfying the formula."""
    if isinstance(formula, str):
        formula = parse_formula(formula)
    mask = _sat_mask(model, formula, tolerance, paper_literal)
    return frozenset(s for s, ok in zip(model.space.states, mask) if ok)


@dataclass(frozen=True)
class CheckResult:
    """Per-state verdicts plus, for threshold formulas, the evaluated values."""

    formula: StateFormula
    satisfied: dict
    values: dict | None

    def holds_at(self, state) -> bool:
        return self.satisfied[state]


def check(model, formula, tolerance: float = 1e-9,
          paper_literal: bool = False) -> CheckResult:
    """Check a formula and report per-state verdicts.

    When the root of the formula is a threshold operator, the evaluated
    numeric vector is reported alongside the verdicts.
    """
    if isinstance(formula, str):
        formula = parse_formula(formula)
    mask = _sat_mask(model, formula, tolerance, paper_literal)
    values = None
    if isinstance(formula, Prob):
        mode = _mode_for(formula.kind, model)
        vec = evaluate_path(model, formula.path, mode, tolerance, paper_literal)
        values = dict(zip(model.space.states, (float(v) for v in vec)))
    elif isinstance(formula, ExpReward):
        mode = _mode_for(formula.kind, model)
        vec = evaluate_reward(model, formula.operand, mode, tolerance, paper_literal)
        values = dict(zip(model.space.states, (float(v) for v in vec)))
    satisfied = dict(zip(model.space.states, (bool(b) for b in mask)))
    return CheckResult(formula=formula, satisfied=satisfied, values=values)
