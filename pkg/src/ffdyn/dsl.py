"""A small text language for maps and points, with printers that invert it.

Grammar::

    map   := "map" "P" INT ":" "[" expr ("," expr)* "]"
    point := "point" "P" INT ":" "[" expr ("," expr)* "]"
    expr  := ["+" | "-"] term (("+" | "-") term)*
    term  := power (("*" | "/") power)*
    power := atom ["^" ["-"] INT]
    atom  := INT | NAME | "(" expr ")"

Map forms use the coordinate names of P^n (``x, y, z, w``, or ``x0..xn``
beyond P^3) and ``t``; division is by nonzero constants only.  Point
coordinates are rational functions of ``t``.  ``#`` starts a comment.
"""

import re
from fractions import Fraction
from dataclasses import dataclass

from flint import fmpq_mpoly_ctx

from .errors import (
    AllZero, DSLSyntaxError, MixedDegrees, NotHomogeneous, UnsupportedExtension,
)
from .exact import T, RationalFunction, coefficients
from .projective import SelfMapFF, point_from_rational_functions, variable_names

_TOKEN = re.compile(r"\s*(?:(?P<num>\d+)|(?P<name>[A-Za-z_][A-Za-z_0-9]*)|(?P<op>[-+*/^()\[\],:.]))")


@dataclass
class _Tok:
    kind: str
    text: str
    pos: int


def _strip_comments(text):
    return "\n".join(line.split("#", 1)[0] for line in text.splitlines())


def _tokenize(text):
    toks, pos = [], 0
    while True:
        while pos < len(text) and text[pos].isspace():
            pos += 1
        if pos >= len(text):
            break
        m = _TOKEN.match(text, pos)
        if m is None:
            raise DSLSyntaxError(f"unexpected character {text[pos]!r}", pos)
        kind = m.lastgroup
        toks.append(_Tok(kind, m.group(kind), m.start(kind)))
        pos = m.end()
    toks.append(_Tok("end", "", len(text)))
    return toks


class _Parser:
    def __init__(self, text, algebra):
        self.toks = _tokenize(_strip_comments(text))
        self.i = 0
        self.alg = algebra

    @property
    def cur(self):
        return self.toks[self.i]

    def take(self, *texts):
        tok = self.cur
        if tok.text not in texts:
            got = tok.text or "end of input"
            raise DSLSyntaxError(f"unexpected {got!r}", tok.pos, texts)
        self.i += 1
        return tok

    def take_int(self):
        tok = self.cur
        if tok.kind != "num":
            raise DSLSyntaxError(f"unexpected {tok.text or 'end of input'!r}", tok.pos,
                                 ("integer",))
        self.i += 1
        return int(tok.text)

    def header(self, keyword):
        self.take(keyword)
        tok = self.cur
        m = re.fullmatch(r"P(\d+)", tok.text)
        if m is None:
            raise DSLSyntaxError(f"unexpected {tok.text!r}", tok.pos, ("P<n>",))
        self.i += 1
        self.take(":")
        return int(m.group(1))

    def entries(self):
        self.take("[")
        out = [self.expr()]
        while self.cur.text == ",":
            self.i += 1
            out.append(self.expr())
        self.take("]")
        if self.cur.kind != "end":
            raise DSLSyntaxError(f"trailing {self.cur.text!r}", self.cur.pos, ("end of input",))
        return out

    def expr(self):
        sign = 1
        if self.cur.text in ("+", "-"):
            sign = -1 if self.take("+", "-").text == "-" else 1
        acc = self.term()
        if sign < 0:
            acc = -acc
        while self.cur.text in ("+", "-"):
            op = self.take("+", "-").text
            rhs = self.term()
            acc = acc + rhs if op == "+" else acc - rhs
        return acc

    def term(self):
        acc = self.power()
        while self.cur.text in ("*", "/"):
            tok = self.take("*", "/")
            rhs = self.power()
            acc = acc * rhs if tok.text == "*" else self.alg.divide(acc, rhs, tok.pos)
        return acc

    def power(self):
        base = self.atom()
        if self.cur.text != "^":
            return base
        self.i += 1
        neg = False
        if self.cur.text == "-":
            self.i += 1
            neg = True
        if self.cur.text == "(":
            raise UnsupportedExtension(
                f"only integer exponents are supported (position {self.cur.pos})")
        k = self.take_int()
        if self.cur.text == ".":
            raise UnsupportedExtension(
                f"only integer exponents are supported (position {self.cur.pos})")
        return self.alg.power(base, -k if neg else k, self.cur.pos)

    def atom(self):
        tok = self.cur
        if tok.kind == "num":
            self.i += 1
            if self.cur.text == ".":
                raise DSLSyntaxError("decimal numbers are not supported; use a fraction",
                                     self.cur.pos, ("integer",))
            return self.alg.number(int(tok.text))
        if tok.kind == "name":
            self.i += 1
            if self.cur.text == "(":
                raise UnsupportedExtension(f"function {tok.text!r} is not supported "
                                           f"(position {tok.pos})")
            return self.alg.name(tok.text, tok.pos)
        if tok.text == "(":
            self.i += 1
            inner = self.expr()
            self.take(")")
            return inner
        raise DSLSyntaxError(f"unexpected {tok.text or 'end of input'!r}", tok.pos,
                             ("number", "name", "("))


class _MapAlgebra:
    def __init__(self, n):
        self.names = variable_names(n)
        self.ctx = fmpq_mpoly_ctx.get(self.names + ("t",), "lex")
        self.gens = dict(zip(self.names + ("t",), self.ctx.gens()))

    def number(self, k):
        return self.ctx.constant(k)

    def name(self, s, pos):
        if s not in self.gens:
            raise DSLSyntaxError(f"unknown variable {s!r}", pos, self.names + ("t",))
        return self.gens[s]

    def divide(self, a, b, pos):
        if not b.is_constant() or b.is_zero():
            raise DSLSyntaxError("map forms may only be divided by nonzero constants", pos)
        return a / b.leading_coefficient()

    def power(self, base, k, pos):
        if k < 0:
            raise DSLSyntaxError("negative exponent in a map form", pos, ("integer >= 0",))
        return base ** k


class _PointAlgebra:
    def number(self, k):
        return RationalFunction(k)

    def name(self, s, pos):
        if s != "t":
            raise DSLSyntaxError(f"unknown variable {s!r}", pos, ("t",))
        return RationalFunction(T)

    def divide(self, a, b, pos):
        if b.is_zero():
            raise DSLSyntaxError("division by zero", pos)
        return a / b

    def power(self, base, k, pos):
        if k < 0:
            if base.is_zero():
                raise DSLSyntaxError("division by zero", pos)
            return RationalFunction(1) / base ** (-k)
        return base ** k


def _check_dimension(n, entries, pos):
    if n < 1:
        raise DSLSyntaxError("dimension must be at least 1", pos)
    if len(entries) != n + 1:
        raise DSLSyntaxError(f"P{n} needs {n + 1} coordinates, got {len(entries)}", pos)


def parse_map(text):
    """Parse ``map P<n>: [F_0, ..., F_n]`` into a :class:`SelfMapFF`."""
    head = _Parser(text, None)
    n = head.header("map")
    parser = _Parser(text, _MapAlgebra(n))
    parser.i = head.i
    forms = parser.entries()
    _check_dimension(n, forms, 0)
    if all(F.is_zero() for F in forms):
        raise AllZero("all forms vanish")
    degs = []
    for i, F in enumerate(forms):
        if F.is_zero():
            continue
        ds = {sum(m[:n + 1]) for m in F.monoms()}
        if len(ds) > 1:
            raise NotHomogeneous(f"coordinate {i} mixes x-degrees {sorted(ds)}")
        degs.append(ds.pop())
    if len(set(degs)) > 1:
        raise MixedDegrees(f"coordinates have x-degrees {degs}")
    return SelfMapFF(forms)


def parse_point(text):
    """Parse ``point P<n>: [f_0, ..., f_n]`` into a normalized point."""
    parser = _Parser(text, _PointAlgebra())
    n = parser.header("point")
    coords = parser.entries()
    _check_dimension(n, coords, 0)
    return point_from_rational_functions(coords)


# ---------------------------------------------------------------------------
# printing

def _fmt_rational(c):
    c = Fraction(c)
    return str(c.numerator) if c.denominator == 1 else f"{c.numerator}/{c.denominator}"


def format_poly(coeffs, var="t"):
    """Text for ``sum coeffs[k] * var^k`` (highest power first)."""
    parts = []
    for k in range(len(coeffs) - 1, -1, -1):
        c = Fraction(coeffs[k])
        if c == 0:
            continue
        mag = -c if c < 0 else c
        mono = "" if k == 0 else var if k == 1 else f"{var}^{k}"
        if not mono:
            body = _fmt_rational(mag)
        elif mag == 1:
            body = mono
        else:
            body = f"{_fmt_rational(mag)}*{mono}"
        parts.append(("-" if c < 0 else "+", body))
    if not parts:
        return "0"
    sign, body = parts[0]
    out = ("-" if sign == "-" else "") + body
    for sign, body in parts[1:]:
        out += f" {sign} {body}"
    return out


def _x_monomial(names, xs):
    return "*".join(v if a == 1 else f"{v}^{a}" for v, a in zip(names, xs) if a)


def format_form(terms, names):
    parts = []
    for xs, coef in terms:
        cs = coefficients(coef)
        mono = _x_monomial(names, xs)
        nz = [k for k, c in enumerate(cs) if c != 0]
        neg = False
        if nz == [0]:
            c = Fraction(cs[0])
            neg = c < 0
            mag = -c if neg else c
            if not mono:
                body = _fmt_rational(mag)
            else:
                body = mono if mag == 1 else f"{_fmt_rational(mag)}*{mono}"
        elif len(nz) == 1:
            c = Fraction(cs[nz[0]])
            neg = c < 0
            poly = format_poly([(-x if neg else x) for x in cs])
            body = f"{poly}*{mono}" if mono else poly
        else:
            poly = f"({format_poly(cs)})"
            body = f"{poly}*{mono}" if mono else poly
        parts.append((neg, body))
    if not parts:
        return "0"
    neg, body = parts[0]
    out = ("-" if neg else "") + body
    for neg, body in parts[1:]:
        out += f" {'-' if neg else '+'} {body}"
    return out


def format_map(f):
    names = variable_names(f.n)
    forms = [format_form(terms, names) for terms in f.grouped_terms()]
    return f"map P{f.n}: [{', '.join(forms)}]"


def format_point(P):
    coords = [format_poly(coefficients(p)) for p in P.polys]
    return f"point P{P.n}: [{', '.join(coords)}]"
