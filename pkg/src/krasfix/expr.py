"""Single-variable arithmetic expressions: parse, evaluate, differentiate.

Grammar::

    expr   := term (('+'|'-') term)*
    term   := factor (('*'|'/') factor)*
    factor := '-' factor | power
    power  := atom ('^' factor)?
    atom   := NUMBER | 'x' | IDENT '(' expr ')' | '(' expr ')'

``IDENT`` is one of sin cos tan exp log sqrt abs.  ``^`` is right
associative and binds tighter than unary minus, so ``-x^2`` is ``-(x^2)``.
"""

from __future__ import annotations

import math
import re
from dataclasses import dataclass
from typing import Union

from .errors import ConfigError, EvaluationError, KrasfixError
from .model import Interval, RealFunction

FUNCTIONS = ("sin", "cos", "tan", "exp", "log", "sqrt", "abs")


class ExprSyntaxError(KrasfixError, ValueError):
    def __init__(self, text, offset, expected, found):
        self.text = text
        self.offset = offset
        self.expected = tuple(sorted(expected))
        self.found = found
        super().__init__(
            f"syntax error at offset {offset}: expected one of "
            f"{', '.join(self.expected)}; found {found!r}")


class UnknownIdentifierError(KrasfixError, ValueError):
    def __init__(self, name, offset):
        self.name = name
        self.offset = offset
        super().__init__(f"unknown identifier {name!r} at offset {offset}")


class NonDifferentiableError(KrasfixError, ValueError):
    pass


class ExprDomainError(EvaluationError):
    def __init__(self, node, x, why):
        self.node = node
        super().__init__(x, f"{why} in {to_text(node)!r}")


# AST


@dataclass(frozen=True)
class Number:
    value: float


@dataclass(frozen=True)
class Variable:
    pass


@dataclass(frozen=True)
class Neg:
    child: "Expr"


@dataclass(frozen=True)
class Binary:
    op: str
    left: "Expr"
    right: "Expr"


@dataclass(frozen=True)
class Call:
    name: str
    child: "Expr"


Expr = Union[Number, Variable, Neg, Binary, Call]
X = Variable()


# Parsing

_TOKEN = re.compile(r"""
    (?P<ws>\s+)
  | (?P<number>(?:\d+\.?\d*|\.\d+)(?:[eE][+-]?\d+)?)
  | (?P<ident>[A-Za-z_][A-Za-z_0-9]*)
  | (?P<op>[-+*/^()])
""", re.VERBOSE)


def _tokenize(text):
    tokens = []
    pos = 0
    while pos < len(text):
        m = _TOKEN.match(text, pos)
        if m is None:
            raise ExprSyntaxError(text, pos, {"number", "x", "function", "(", "-"}, text[pos])
        if m.lastgroup != "ws":
            kind = m.lastgroup
            tokens.append((kind, m.group(), pos))
        pos = m.end()
    tokens.append(("end", "", len(text)))
    return tokens


class _Parser:
    def __init__(self, text):
        self.text = text
        self.tokens = _tokenize(text)
        self.i = 0

    @property
    def tok(self):
        return self.tokens[self.i]

    def fail(self, expected):
        kind, value, pos = self.tok
        raise ExprSyntaxError(self.text, pos, expected, value or "end of input")

    def accept(self, value):
        if self.tok[0] == "op" and self.tok[1] == value:
            self.i += 1
            return True
        return False

    def expect(self, value):
        if not self.accept(value):
            self.fail({value})

    def parse(self):
        node = self.expr()
        if self.tok[0] != "end":
            self.fail({"+", "-", "*", "/", "^", "end of input"})
        return node

    def expr(self):
        node = self.term()
        while self.tok[0] == "op" and self.tok[1] in "+-":
            op = self.tok[1]
            self.i += 1
            node = Binary(op, node, self.term())
        return node

    def term(self):
        node = self.factor()
        while self.tok[0] == "op" and self.tok[1] in "*/":
            op = self.tok[1]
            self.i += 1
            node = Binary(op, node, self.factor())
        return node

    def factor(self):
        if self.accept("-"):
            return Neg(self.factor())
        return self.power()

    def power(self):
        base = self.atom()
        if self.accept("^"):
            return Binary("^", base, self.factor())
        return base

    def atom(self):
        kind, value, pos = self.tok
        if kind == "number":
            self.i += 1
            return Number(float(value))
        if kind == "ident":
            self.i += 1
            if value == "x":
                return X
            if value not in FUNCTIONS:
                raise UnknownIdentifierError(value, pos)
            self.expect("(")
            child = self.expr()
            self.expect(")")
            return Call(value, child)
        if self.accept("("):
            node = self.expr()
            self.expect(")")
            return node
        self.fail({"number", "x", "function", "(", "-"})


def parse(text: str) -> Expr:
    return _Parser(text).parse()


# Printing

_PREC = {"+": 1, "-": 1, "*": 2, "/": 2}
_NEG_PREC = 3
_POW_PREC = 4
_ATOM_PREC = 5


def _prec(node):
    if isinstance(node, Binary):
        return _POW_PREC if node.op == "^" else _PREC[node.op]
    if isinstance(node, Neg):
        return _NEG_PREC
    return _ATOM_PREC


def _wrap(node, needs):
    text = to_text(node)
    return f"({text})" if needs else text


def to_text(node: Expr) -> str:
    """Canonical text; ``parse(to_text(e)) == e`` for non-negative literals."""
    if isinstance(node, Number):
        return repr(node.value)
    if isinstance(node, Variable):
        return "x"
    if isinstance(node, Call):
        return f"{node.name}({to_text(node.child)})"
    if isinstance(node, Neg):
        return "-" + _wrap(node.child, _prec(node.child) < _NEG_PREC)
    if node.op == "^":
        base = _wrap(node.left, _prec(node.left) < _ATOM_PREC)
        exponent = _wrap(node.right, _prec(node.right) < _NEG_PREC)
        return f"{base}^{exponent}"
    p = _PREC[node.op]
    left = _wrap(node.left, _prec(node.left) < p)
    right = _wrap(node.right, _prec(node.right) <= p)
    return f"{left} {node.op} {right}"


# Evaluation

def _call(node, u, x):
    name = node.name
    if name == "log":
        if u <= 0:
            raise ExprDomainError(node, x, f"log of non-positive {u!r}")
        return math.log(u)
    if name == "sqrt":
        if u < 0:
            raise ExprDomainError(node, x, f"sqrt of negative {u!r}")
        return math.sqrt(u)
    if name == "abs":
        return abs(u)
    try:
        return getattr(math, name)(u)
    except (OverflowError, ValueError) as exc:
        raise ExprDomainError(node, x, str(exc)) from exc


def _binary(node, a, b, x):
    op = node.op
    if op == "+":
        return a + b
    if op == "-":
        return a - b
    if op == "*":
        return a * b
    if op == "/":
        if b == 0:
            raise ExprDomainError(node, x, "division by zero")
        return a / b
    try:
        return math.pow(a, b)
    except (OverflowError, ValueError) as exc:
        raise ExprDomainError(node, x, f"cannot raise {a!r} to {b!r}") from exc


def evaluate(node: Expr, x: float) -> float:
    """Value of ``node`` at ``x``.  Domain violations raise
    :class:`ExprDomainError` rather than returning NaN."""
    if isinstance(node, Number):
        return node.value
    if isinstance(node, Variable):
        return x
    if isinstance(node, Neg):
        value = -evaluate(node.child, x)
    elif isinstance(node, Call):
        value = _call(node, evaluate(node.child, x), x)
    else:
        value = _binary(node, evaluate(node.left, x), evaluate(node.right, x), x)
    if not math.isfinite(value):
        raise ExprDomainError(node, x, f"non-finite result {value!r}")
    return value


# Differentiation

def contains_variable(node: Expr) -> bool:
    if isinstance(node, Variable):
        return True
    if isinstance(node, Number):
        return False
    if isinstance(node, (Neg, Call)):
        return contains_variable(node.child)
    return contains_variable(node.left) or contains_variable(node.right)


def _const(node):
    """Numeric value of a literal or negated literal, else None."""
    if isinstance(node, Number):
        return node.value
    if isinstance(node, Neg) and isinstance(node.child, Number):
        return -node.child.value
    return None


def num(value: float) -> Expr:
    # literals stay non-negative so printed forms re-parse identically
    value = float(value)
    if value < 0:
        return Neg(Number(-value))
    return Number(value + 0.0)


def neg(a: Expr) -> Expr:
    c = _const(a)
    if c is not None:
        return num(-c)
    if isinstance(a, Neg):
        return a.child
    return Neg(a)


def add(a, b):
    ca, cb = _const(a), _const(b)
    if ca is not None and cb is not None:
        return num(ca + cb)
    if ca == 0:
        return b
    if cb == 0:
        return a
    if isinstance(b, Neg):
        return sub(a, b.child)
    return Binary("+", a, b)


def sub(a, b):
    ca, cb = _const(a), _const(b)
    if ca is not None and cb is not None:
        return num(ca - cb)
    if cb == 0:
        return a
    if ca == 0:
        return neg(b)
    if isinstance(b, Neg):
        return add(a, b.child)
    return Binary("-", a, b)


def mul(a, b):
    ca, cb = _const(a), _const(b)
    if ca is not None and cb is not None:
        return num(ca * cb)
    if ca == 0 or cb == 0:
        return Number(0.0)
    if ca == 1:
        return b
    if cb == 1:
        return a
    if ca == -1:
        return neg(b)
    if cb == -1:
        return neg(a)
    if isinstance(a, Neg):
        return neg(mul(a.child, b))
    if isinstance(b, Neg):
        return neg(mul(a, b.child))
    return Binary("*", a, b)


def div(a, b):
    ca, cb = _const(a), _const(b)
    if ca is not None and cb is not None and cb != 0:
        return num(ca / cb)
    if ca == 0 and cb != 0:
        return Number(0.0)
    if cb == 1:
        return a
    if isinstance(a, Neg):
        return neg(div(a.child, b))
    return Binary("/", a, b)


def power(a, b):
    cb = _const(b)
    if cb == 1:
        return a
    if cb == 0:
        return Number(1.0)
    return Binary("^", a, b)


def _d(node, notes):
    if isinstance(node, Number):
        return Number(0.0)
    if isinstance(node, Variable):
        return Number(1.0)
    if isinstance(node, Neg):
        return neg(_d(node.child, notes))
    if isinstance(node, Call):
        u = node.child
        du = _d(u, notes)
        name = node.name
        if name == "abs":
            raise NonDifferentiableError(
                f"abs is not differentiable at 0; supply derivatives by hand for {to_text(node)!r}")
        if name == "sin":
            outer = Call("cos", u)
        elif name == "cos":
            outer = neg(Call("sin", u))
        elif name == "tan":
            outer = div(Number(1.0), power(Call("cos", u), Number(2.0)))
        elif name == "exp":
            outer = node
        elif name == "log":
            return div(du, u)
        else:  # sqrt
            return div(du, mul(Number(2.0), node))
        return mul(outer, du)

    a, b = node.left, node.right
    op = node.op
    if op == "+":
        return add(_d(a, notes), _d(b, notes))
    if op == "-":
        return sub(_d(a, notes), _d(b, notes))
    if op == "*":
        return add(mul(_d(a, notes), b), mul(a, _d(b, notes)))
    if op == "/":
        return div(sub(mul(_d(a, notes), b), mul(a, _d(b, notes))), power(b, Number(2.0)))

    # op == "^"
    if not contains_variable(b):
        c = evaluate(b, 0.0)
        return mul(mul(num(c), power(a, num(c - 1))), _d(a, notes))
    rewritten = Call("exp", mul(b, Call("log", a)))
    notes.append(f"rewrote {to_text(node)!r} as {to_text(rewritten)!r}; "
                 f"the derivative requires {to_text(a)!r} > 0")
    return _d(rewritten, notes)


def differentiate(node: Expr, notes: list | None = None) -> Expr:
    """Symbolic derivative with light simplification (constant folding,
    ``0*e``, ``1*e``, ``e+0`` and double negation).

    A power whose exponent depends on ``x`` is differentiated as
    ``exp(b*log(a))``; a message describing the rewrite is appended to
    ``notes`` when given.
    """
    return _d(node, notes if notes is not None else [])


def contains_abs(node: Expr) -> bool:
    if isinstance(node, Call):
        return node.name == "abs" or contains_abs(node.child)
    if isinstance(node, Neg):
        return contains_abs(node.child)
    if isinstance(node, Binary):
        return contains_abs(node.left) or contains_abs(node.right)
    return False


def to_function(text: str, domain: Interval | None = None, derivatives=True,
                notes: list | None = None) -> RealFunction:
    """Build a :class:`RealFunction` from expression text.

    With ``derivatives`` the first and second derivatives are attached;
    this raises :class:`NonDifferentiableError` if the text uses ``abs``.
    """
    ast = parse(text)
    d1 = d2 = None
    if derivatives:
        t1 = differentiate(ast, notes)
        t2 = differentiate(t1, notes)
        d1 = lambda x: evaluate(t1, x)  # noqa: E731
        d2 = lambda x: evaluate(t2, x)  # noqa: E731
    if domain is None:
        domain = Interval.real_line()
    if not isinstance(domain, Interval):
        raise ConfigError("domain must be an Interval")
    return RealFunction(lambda x: evaluate(ast, x), domain, d1, d2, name=text)
