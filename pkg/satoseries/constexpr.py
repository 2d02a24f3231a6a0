"""Closed-form constants: grammar, parser, printer, evaluator and value tables.

Grammar (whitespace-insensitive)::

    expr   := term (("+" | "-") term)*
    term   := unary (("*" | "/") unary)*
    unary  := "-" unary | power
    power  := atom ("^" exponent)*
    exponent := INT | "(" ["-"] INT ["/" INT] ")"
    atom   := INT | "pi" | "i" | "gamma(" rational ")" | "expi(" rational ")"
            | "sqrt(" expr ")" | "(" expr ")"

``expi(r)`` is exp(pi*i*r).  ``i`` is accepted only when parsing table points.
"""

from __future__ import annotations

import logging
import re
from dataclasses import dataclass, field
from fractions import Fraction
from pathlib import Path
from typing import Iterable, Union

from .exceptions import (
    CatalogError,
    DomainError,
    ExpressionSyntaxError,
    InsufficientPrecision,
    SatoSeriesError,
)
from .specfun import PrecisionContext, digits_matched, eval_function, eval_gamma

logger = logging.getLogger(__name__)


# ---------------------------------------------------------------------------
# AST
# ---------------------------------------------------------------------------
@dataclass(frozen=True)
class Num:
    value: int


@dataclass(frozen=True)
class Pi:
    pass


@dataclass(frozen=True)
class I:
    pass


@dataclass(frozen=True)
class Gamma:
    arg: Fraction


@dataclass(frozen=True)
class ExpPiI:
    arg: Fraction


@dataclass(frozen=True)
class Sqrt:
    arg: "Expr"


@dataclass(frozen=True)
class Pow:
    base: "Expr"
    exponent: Fraction


@dataclass(frozen=True)
class Neg:
    arg: "Expr"


@dataclass(frozen=True)
class BinOp:
    op: str
    left: "Expr"
    right: "Expr"


Expr = Union[Num, Pi, I, Gamma, ExpPiI, Sqrt, Pow, Neg, BinOp]

_ATOM, _POW, _NEG, _MUL, _ADD = 5, 4, 3, 2, 1


def _precedence(e: Expr) -> int:
    if isinstance(e, BinOp):
        return _ADD if e.op in "+-" else _MUL
    if isinstance(e, Neg):
        return _NEG
    if isinstance(e, Pow):
        return _POW
    return _ATOM


# ---------------------------------------------------------------------------
# Parser
# ---------------------------------------------------------------------------
_TOKEN = re.compile(r"\s*(?:(\d+)|([a-z]+)|(.))")


class _Parser:
    def __init__(self, text: str, allow_i: bool):
        self.text = text
        self.allow_i = allow_i
        self.tokens: list[tuple[str, str, int]] = []
        pos = 0
        while pos < len(text):
            m = _TOKEN.match(text, pos)
            if not m or m.end() == pos:
                break
            start = m.start(m.lastindex) if m.lastindex else m.end()
            if m.group(1):
                self.tokens.append(("int", m.group(1), start))
            elif m.group(2):
                self.tokens.append(("name", m.group(2), start))
            elif m.group(3):
                self.tokens.append(("op", m.group(3), start))
            pos = m.end()
        self.tokens.append(("end", "", len(text)))
        self.i = 0

    # helpers
    def peek(self) -> tuple[str, str, int]:
        return self.tokens[self.i]

    def take(self) -> tuple[str, str, int]:
        tok = self.tokens[self.i]
        self.i += 1
        return tok

    def expect(self, value: str) -> None:
        kind, text, pos = self.take()
        if text != value:
            raise ExpressionSyntaxError(f"expected {value!r}, found {text or 'end of input'!r}", pos)

    def at(self, value: str) -> bool:
        return self.peek()[1] == value and self.peek()[0] == "op"

    # grammar
    def parse(self) -> Expr:
        e = self.expr()
        kind, text, pos = self.peek()
        if kind != "end":
            raise ExpressionSyntaxError(f"unexpected {text!r}", pos)
        return e

    def expr(self) -> Expr:
        e = self.term()
        while self.at("+") or self.at("-"):
            op = self.take()[1]
            e = BinOp(op, e, self.term())
        return e

    def term(self) -> Expr:
        e = self.unary()
        while self.at("*") or self.at("/"):
            _, op, pos = self.take()
            right = self.unary()
            if op == "/" and right in (Num(0), Neg(Num(0))):
                raise ExpressionSyntaxError("zero denominator", pos)
            e = BinOp(op, e, right)
        return e

    def unary(self) -> Expr:
        if self.at("-"):
            self.take()
            return Neg(self.unary())
        return self.power()

    def power(self) -> Expr:
        e = self.atom()
        while self.at("^"):
            self.take()
            e = Pow(e, self.exponent())
        return e

    def integer(self) -> int:
        kind, text, pos = self.take()
        if kind != "int":
            raise ExpressionSyntaxError(f"expected an integer, found {text or 'end of input'!r}", pos)
        return int(text)

    def rational(self) -> Fraction:
        sign = 1
        if self.at("-"):
            self.take()
            sign = -1
        num = self.integer()
        den = 1
        if self.at("/"):
            _, _, pos = self.take()
            den = self.integer()
            if den == 0:
                raise ExpressionSyntaxError("zero denominator", pos)
        return sign * Fraction(num, den)

    def exponent(self) -> Fraction:
        if self.peek()[0] == "int":
            return Fraction(self.integer())
        self.expect("(")
        value = self.rational()
        self.expect(")")
        return value

    def atom(self) -> Expr:
        kind, text, pos = self.take()
        if kind == "int":
            return Num(int(text))
        if kind == "name":
            if text == "pi":
                return Pi()
            if text == "i":
                if not self.allow_i:
                    raise ExpressionSyntaxError("'i' is only allowed in point expressions", pos)
                return I()
            if text in ("gamma", "expi"):
                self.expect("(")
                value = self.rational()
                self.expect(")")
                return Gamma(value) if text == "gamma" else ExpPiI(value)
            if text == "sqrt":
                self.expect("(")
                inner = self.expr()
                self.expect(")")
                return Sqrt(inner)
            raise ExpressionSyntaxError(f"unknown name {text!r}", pos)
        if text == "(":
            inner = self.expr()
            self.expect(")")
            return inner
        raise ExpressionSyntaxError(f"unexpected {text or 'end of input'!r}", pos)


def parse(text: str, allow_i: bool = False) -> Expr:
    """Parse ``text``; raises ExpressionSyntaxError carrying the offending position."""

    return _Parser(text, allow_i).parse()


def parse_point(text: str) -> Expr:
    return parse(text, allow_i=True)


# ---------------------------------------------------------------------------
# Printer
# ---------------------------------------------------------------------------
def _fraction_text(value: Fraction) -> str:
    if value.denominator == 1:
        return str(value.numerator)
    return f"{value.numerator}/{value.denominator}"


def _wrap(e: Expr, minimum: int) -> str:
    text = to_text(e)
    return f"({text})" if _precedence(e) < minimum else text


def to_text(e: Expr) -> str:
    """Canonical form with the fewest parentheses that re-parse to the same tree."""

    if isinstance(e, Num):
        return str(e.value)
    if isinstance(e, Pi):
        return "pi"
    if isinstance(e, I):
        return "i"
    if isinstance(e, Gamma):
        return f"gamma({_fraction_text(e.arg)})"
    if isinstance(e, ExpPiI):
        return f"expi({_fraction_text(e.arg)})"
    if isinstance(e, Sqrt):
        return f"sqrt({to_text(e.arg)})"
    if isinstance(e, Pow):
        if e.exponent.denominator == 1 and e.exponent >= 0:
            exponent = str(e.exponent.numerator)
        else:
            exponent = f"({_fraction_text(e.exponent)})"
        return f"{_wrap(e.base, _POW)}^{exponent}"
    if isinstance(e, Neg):
        return f"-{_wrap(e.arg, _NEG)}"
    if isinstance(e, BinOp):
        if e.op in "+-":
            return f"{_wrap(e.left, _ADD)}{e.op}{_wrap(e.right, _MUL)}"
        return f"{_wrap(e.left, _MUL)}{e.op}{_wrap(e.right, _NEG)}"
    raise TypeError(f"not an expression node: {e!r}")


# ---------------------------------------------------------------------------
# Evaluation
# ---------------------------------------------------------------------------
def exact_value(e: Expr) -> Fraction | None:
    """Exact rational value of a transcendental-free subtree, else None."""

    if isinstance(e, Num):
        return Fraction(e.value)
    if isinstance(e, Neg):
        inner = exact_value(e.arg)
        return None if inner is None else -inner
    if isinstance(e, Pow) and e.exponent.denominator == 1:
        base = exact_value(e.base)
        if base is None or (base == 0 and e.exponent < 0):
            return None
        return base ** e.exponent.numerator
    if isinstance(e, BinOp):
        left, right = exact_value(e.left), exact_value(e.right)
        if left is None or right is None:
            return None
        if e.op == "+":
            return left + right
        if e.op == "-":
            return left - right
        if e.op == "*":
            return left * right
        if right == 0:
            raise DomainError("division by an exact zero subtree")
        return left / right
    return None


def _real_power(base, exponent: Fraction, mp):
    if mp.im(base) == 0 and mp.re(base) < 0:
        if exponent.denominator % 2 == 0:
            raise DomainError(f"negative base under the even root of ^({_fraction_text(exponent)})")
        magnitude = mp.power(-mp.re(base), mp.mpf(exponent.numerator) / exponent.denominator)
        return -magnitude if exponent.numerator % 2 else magnitude
    return mp.power(base, mp.mpf(exponent.numerator) / exponent.denominator)


def eval_expr(e: Expr, ctx: PrecisionContext):
    """Evaluate at ``ctx``; rational subtrees are folded exactly first."""

    mp = ctx.mp
    exact = exact_value(e)
    if exact is not None:
        return mp.mpf(exact.numerator) / exact.denominator
    if isinstance(e, Pi):
        return +mp.pi
    if isinstance(e, I):
        return mp.mpc(0, 1)
    if isinstance(e, Gamma):
        return eval_gamma(e.arg, ctx)
    if isinstance(e, ExpPiI):
        return mp.expjpi(mp.mpf(e.arg.numerator) / e.arg.denominator)
    if isinstance(e, Sqrt):
        return mp.sqrt(eval_expr(e.arg, ctx))
    if isinstance(e, Pow):
        base = eval_expr(e.base, ctx)
        if e.exponent.denominator == 1:
            if base == 0 and e.exponent < 0:
                raise DomainError("zero raised to a negative power")
            return base ** int(e.exponent)
        return _real_power(base, e.exponent, mp)
    if isinstance(e, Neg):
        return -eval_expr(e.arg, ctx)
    left, right = eval_expr(e.left, ctx), eval_expr(e.right, ctx)
    if e.op == "+":
        return left + right
    if e.op == "-":
        return left - right
    if e.op == "*":
        return left * right
    if exact_value(e.right) == 0:
        raise DomainError("division by an exact zero subtree")
    return left / right


def evaluate_text(text: str, ctx: PrecisionContext, allow_i: bool = False):
    return eval_expr(parse(text, allow_i=allow_i), ctx)


# ---------------------------------------------------------------------------
# Value tables
# ---------------------------------------------------------------------------
TABLE_NAMES = ("jvals", "etavals", "ekvals", "e2kvals", "examples")
SUSPECT_PREFIX = "suspect:"


@dataclass(frozen=True)
class TableRow:
    point: Expr
    function: str
    value: Expr
    provenance: str = ""
    line: int = 0

    @property
    def suspect(self) -> bool:
        return self.provenance.startswith(SUSPECT_PREFIX)

    def to_line(self) -> str:
        return f"{to_text(self.point)} | {self.function} | {to_text(self.value)} | {self.provenance}"


@dataclass(frozen=True)
class ValueTable:
    name: str
    rows: tuple[TableRow, ...]


@dataclass
class RowResult:
    point: str
    function: str
    residual: str
    digits_matched: int
    passed: bool
    flagged: bool = False
    provenance: str = ""
    error: str = ""


@dataclass
class TableReport:
    name: str
    digits: int
    rows: list[RowResult] = field(default_factory=list)

    @property
    def passed(self) -> int:
        return sum(1 for r in self.rows if r.passed)

    @property
    def failed(self) -> int:
        return sum(1 for r in self.rows if not r.passed and not r.flagged)

    @property
    def flagged(self) -> int:
        return sum(1 for r in self.rows if r.flagged)

    @property
    def ok(self) -> bool:
        return self.failed == 0


def parse_table(name: str, lines: Iterable[str]) -> ValueTable:
    """Parse ``point | function | expression | provenance`` lines; ``#`` starts a comment."""

    rows = []
    for number, raw in enumerate(lines, start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        parts = [p.strip() for p in line.split("|")]
        if len(parts) != 4:
            raise CatalogError(f"{name}:{number}: expected 4 '|'-separated fields")
        point_text, function, value_text, provenance = parts
        try:
            point, value = parse_point(point_text), parse(value_text)
        except ExpressionSyntaxError as exc:
            raise CatalogError(f"{name}:{number}: {exc}") from exc
        rows.append(TableRow(point, function, value, provenance, number))
    return ValueTable(name, tuple(rows))


def load_table(name: str, catalog_dir: Path | str) -> ValueTable:
    if name not in TABLE_NAMES:
        raise CatalogError(f"unknown table {name!r}; choose from {', '.join(TABLE_NAMES)}")
    path = Path(catalog_dir) / "tables" / f"{name}.txt"
    if not path.exists():
        raise CatalogError(f"table file {path} is missing")
    table = parse_table(name, path.read_text(encoding="utf-8").splitlines())
    probe = PrecisionContext(15)
    for row in table.rows:
        if probe.mp.im(eval_expr(row.point, probe)) <= 0:
            raise CatalogError(f"{name}:{row.line}: point {to_text(row.point)} is not in the upper half plane")
    return table


def verify_table(table: ValueTable, ctx: PrecisionContext) -> TableReport:
    """Compare each closed form against direct evaluation of its function.

    A row passes when the residual is below 10^-(digits-10) relative to
    max(1, |direct value|).  Rows marked ``suspect:`` that fail are flagged.
    """

    if ctx.digits < 40:
        raise InsufficientPrecision(f"table verification needs at least 40 digits, got {ctx.digits}")
    mp = ctx.mp
    report = TableReport(table.name, ctx.digits)
    threshold = ctx.digits - 10
    for row in table.rows:
        point_text = to_text(row.point)
        try:
            tau = eval_expr(row.point, ctx)
            direct = eval_function(row.function, tau, ctx)
            closed = eval_expr(row.value, ctx)
        except SatoSeriesError as exc:
            logger.warning("table %s row %s raised %s", table.name, point_text, exc)
            report.rows.append(
                RowResult(point_text, row.function, "nan", 0, False, row.suspect, row.provenance, str(exc))
            )
            continue
        residual = abs(closed - direct)
        matched = digits_matched(closed, direct, mp)
        passed = residual < mp.mpf(10) ** (-threshold) * max(1, abs(direct))
        logger.debug("%s %s(%s): residual %s", table.name, row.function, point_text, mp.nstr(residual, 5))
        report.rows.append(
            RowResult(
                point_text,
                row.function,
                mp.nstr(residual, 5),
                matched,
                passed,
                (not passed) and row.suspect,
                row.provenance,
            )
        )
    return report
