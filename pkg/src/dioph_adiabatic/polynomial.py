"""Integer-coefficient multivariate polynomials.

Polynomials are written with variables ``x1``..``xK``, signed integer
literals, ``+ - * ^`` and parentheses, e.g. ``"(x1 + 1)*(x2 + 1) - 6"``.
Values are computed with Python integers, so evaluation never overflows.
"""

from __future__ import annotations

import itertools
import re
from dataclasses import dataclass
from typing import Iterator, Sequence

from .errors import PolynomialSyntaxError, PrecisionGuardError

__all__ = [
    "DiophantinePolynomial",
    "parse",
    "evaluate",
    "has_solution_under_cutoff",
    "square_as_float",
    "FLOAT_EXACT_LIMIT",
]

#: Largest magnitude an integer may have and still convert to a float exactly.
FLOAT_EXACT_LIMIT = 2**53

Exponents = tuple[int, ...]


@dataclass(frozen=True)
class DiophantinePolynomial:
    """Canonical polynomial ``sum(coef * x1^e1 * ... * xK^eK)``.

    ``terms`` is kept sorted (highest total degree first), never holds a zero
    coefficient and never repeats an exponent tuple. Build instances through
    :func:`parse` or :meth:`from_terms` rather than by hand.
    """

    num_vars: int
    terms: tuple[tuple[int, Exponents], ...]

    def __post_init__(self):
        if self.num_vars < 1:
            raise ValueError("num_vars must be >= 1")
        seen = set()
        for coef, exps in self.terms:
            if len(exps) != self.num_vars:
                raise ValueError(f"exponent tuple {exps} does not have length {self.num_vars}")
            if any(e < 0 for e in exps):
                raise ValueError(f"negative exponent in {exps}")
            if coef == 0:
                raise ValueError("zero coefficient in canonical form")
            if exps in seen:
                raise ValueError(f"repeated exponent tuple {exps}")
            seen.add(exps)

    @classmethod
    def from_terms(cls, num_vars: int, terms) -> "DiophantinePolynomial":
        """Combine like terms, drop zeros and sort into canonical order."""
        acc: dict[Exponents, int] = {}
        for coef, exps in terms:
            exps = tuple(int(e) for e in exps)
            acc[exps] = acc.get(exps, 0) + int(coef)
        return cls(num_vars, _canonical(acc))

    @classmethod
    def constant(cls, value: int, num_vars: int = 1) -> "DiophantinePolynomial":
        return cls.from_terms(num_vars, [(value, (0,) * num_vars)])

    def as_dict(self) -> dict[Exponents, int]:
        return {exps: coef for coef, exps in self.terms}

    @property
    def degree(self) -> int:
        return max((sum(e) for _, e in self.terms), default=0)

    def is_constant(self) -> bool:
        return self.degree == 0

    def __call__(self, *point: int) -> int:
        return evaluate(self, point)

    def __str__(self) -> str:
        return format_polynomial(self)


def _canonical(acc: dict[Exponents, int]) -> tuple[tuple[int, Exponents], ...]:
    items = [(c, e) for e, c in acc.items() if c != 0]
    items.sort(key=lambda t: (-sum(t[1]), tuple(-x for x in t[1])))
    return tuple(items)


def format_polynomial(poly: DiophantinePolynomial) -> str:
    """Render ``poly`` in the same grammar :func:`parse` accepts."""
    if not poly.terms:
        return "0"
    pieces = []
    for coef, exps in poly.terms:
        factors = [
            f"x{i + 1}" if e == 1 else f"x{i + 1}^{e}"
            for i, e in enumerate(exps)
            if e > 0
        ]
        mag = abs(coef)
        if not factors:
            body = str(mag)
        elif mag == 1:
            body = "*".join(factors)
        else:
            body = "*".join([str(mag)] + factors)
        sign = "-" if coef < 0 else "+"
        pieces.append((sign, body))
    first_sign, first_body = pieces[0]
    out = ("-" if first_sign == "-" else "") + first_body
    for sign, body in pieces[1:]:
        out += f" {sign} {body}"
    return out


# --- parsing -----------------------------------------------------------------

_TOKEN = re.compile(r"\s*(?:(?P<int>\d+)|(?P<var>x\d+)|(?P<op>[-+*^()]))")


def _tokenize(text: str) -> list[tuple[str, str, int]]:
    tokens = []
    pos = 0
    while pos < len(text):
        if text[pos:].strip() == "":
            break
        m = _TOKEN.match(text, pos)
        if m is None or m.end() == pos:
            bad = pos + (len(text[pos:]) - len(text[pos:].lstrip()))
            raise PolynomialSyntaxError(f"unexpected character {text[bad]!r}", bad)
        kind = m.lastgroup
        start = m.start(kind)
        tokens.append((kind, m.group(kind), start))
        pos = m.end()
    tokens.append(("end", "", len(text)))
    return tokens


class _Parser:
    # Polynomials are dicts {exponents: coef} over a growing variable count;
    # exponent tuples are padded to the final K once parsing ends.

    def __init__(self, text: str):
        self.tokens = _tokenize(text)
        self.i = 0
        self.max_var = 0

    def peek(self):
        return self.tokens[self.i]

    def take(self):
        tok = self.tokens[self.i]
        self.i += 1
        return tok

    def expect(self, value: str):
        kind, val, pos = self.take()
        if val != value:
            raise PolynomialSyntaxError(f"expected {value!r}, found {val or 'end of input'!r}", pos)

    def parse(self) -> dict:
        if self.peek()[0] == "end":
            raise PolynomialSyntaxError("empty polynomial", 0)
        result = self.expr()
        kind, val, pos = self.peek()
        if kind != "end":
            raise PolynomialSyntaxError(f"unexpected token {val!r}", pos)
        return result

    def expr(self) -> dict:
        acc = self.term()
        while self.peek()[1] in ("+", "-"):
            op = self.take()[1]
            rhs = self.term()
            acc = _add(acc, rhs if op == "+" else _scale(rhs, -1))
        return acc

    def term(self) -> dict:
        acc = self.factor()
        while self.peek()[1] == "*":
            self.take()
            acc = _mul(acc, self.factor())
        return acc

    def factor(self) -> dict:
        if self.peek()[1] in ("+", "-"):
            op = self.take()[1]
            inner = self.factor()
            return inner if op == "+" else _scale(inner, -1)
        return self.power()

    def power(self) -> dict:
        base = self.atom()
        if self.peek()[1] == "^":
            self.take()
            kind, val, pos = self.take()
            if kind != "int":
                raise PolynomialSyntaxError(
                    "exponent must be a non-negative integer literal", pos
                )
            n = int(val)
            result = {(): 1}
            for _ in range(n):
                result = _mul(result, base)
            base = result
            if self.peek()[1] == "^":
                raise PolynomialSyntaxError(
                    "chained exponents are ambiguous; use parentheses", self.peek()[2]
                )
        return base

    def atom(self) -> dict:
        kind, val, pos = self.take()
        if kind == "int":
            return {(): int(val)}
        if kind == "var":
            idx = int(val[1:])
            if idx == 0:
                raise PolynomialSyntaxError("variable indices start at x1", pos)
            self.max_var = max(self.max_var, idx)
            return {(0,) * (idx - 1) + (1,): 1}
        if val == "(":
            inner = self.expr()
            self.expect(")")
            return inner
        raise PolynomialSyntaxError(f"unexpected token {val or 'end of input'!r}", pos)


def _pad(e: tuple, n: int) -> tuple:
    return e + (0,) * (n - len(e))


def _norm(e: tuple) -> tuple:
    # strip trailing zeros so dict keys are comparable across lengths
    e = list(e)
    while e and e[-1] == 0:
        e.pop()
    return tuple(e)


def _add(p: dict, q: dict) -> dict:
    out = dict(p)
    for e, c in q.items():
        out[e] = out.get(e, 0) + c
    return out


def _scale(p: dict, k: int) -> dict:
    return {e: c * k for e, c in p.items()}


def _mul(p: dict, q: dict) -> dict:
    out: dict = {}
    for e1, c1 in p.items():
        for e2, c2 in q.items():
            n = max(len(e1), len(e2))
            e = _norm(tuple(a + b for a, b in zip(_pad(e1, n), _pad(e2, n))))
            out[e] = out.get(e, 0) + c1 * c2
    return out


def parse(text: str, num_vars: int | None = None) -> DiophantinePolynomial:
    """Parse ``text`` into a canonical :class:`DiophantinePolynomial`.

    Args:
        text: polynomial in the ``x1``..``xK`` grammar.
        num_vars: declared K. Defaults to the highest variable index that
            appears (or 1 for a constant). Must not be smaller than that index.

    Raises:
        PolynomialSyntaxError: on malformed input, with the character offset.
    """
    parser = _Parser(text)
    raw = parser.parse()
    k = max(parser.max_var, 1)
    if num_vars is not None:
        if num_vars < k:
            raise ValueError(f"declared num_vars={num_vars} but x{parser.max_var} appears")
        k = num_vars
    return DiophantinePolynomial.from_terms(k, [(c, _pad(e, k)) for e, c in raw.items()])


# --- evaluation ----------------------------------------------------------------

def evaluate(poly: DiophantinePolynomial, point: Sequence[int]) -> int:
    """Exact value of ``poly`` at an integer point."""
    if len(point) != poly.num_vars:
        raise ValueError(f"expected {poly.num_vars} coordinates, got {len(point)}")
    total = 0
    for coef, exps in poly.terms:
        term = coef
        for x, e in zip(point, exps):
            if e:
                term *= int(x) ** e
        total += term
    return total


def square_as_float(value: int) -> float:
    """Convert ``value**2`` to float, refusing if precision would be lost."""
    sq = value * value
    if sq > FLOAT_EXACT_LIMIT:
        raise PrecisionGuardError(
            f"D^2 = {sq} exceeds 2^53; lower the cutoff or the coefficients"
        )
    return float(sq)


def _box(poly: DiophantinePolynomial, cutoff) -> Iterator[tuple[int, ...]]:
    if isinstance(cutoff, int):
        cutoff = (cutoff,) * poly.num_vars
    if len(cutoff) != poly.num_vars:
        raise ValueError("cutoff arity does not match the polynomial")
    return itertools.product(*(range(int(c) + 1) for c in cutoff))


def has_solution_under_cutoff(poly: DiophantinePolynomial, cutoff) -> tuple[int, ...] | None:
    """Lexicographically smallest root with every ``x_i <= cutoff_i``, or None.

    ``cutoff`` is a single int (applied to every variable) or a K-tuple.
    """
    for point in _box(poly, cutoff):
        if evaluate(poly, point) == 0:
            return point
    return None
