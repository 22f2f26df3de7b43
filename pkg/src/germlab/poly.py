"""Exact multivariate polynomial arithmetic over the rationals.

Polynomials are stored densely: an ordered variable tuple shared by every
term, and a map from exponent tuples to nonzero ``Fraction`` coefficients.
Values are immutable after construction and safe to share.
"""

from __future__ import annotations

import re
from fractions import Fraction
from itertools import combinations
from typing import Iterable, Mapping, Optional, Sequence, Union

from .errors import (
    DimensionMismatchError,
    NegativeExponentError,
    PolyParseError,
    SubstitutionError,
    UnknownVariableError,
)

Scalar = Union[int, Fraction]

_VAR_RE = re.compile(r"[A-Za-z_][A-Za-z0-9_]*")


def _grevlex_key(exponents: tuple[int, ...]) -> tuple:
    # Degrevlex: higher total degree wins; ties broken so that the
    # rightmost differing exponent being smaller makes the monomial larger.
    return (sum(exponents),) + tuple(-e for e in reversed(exponents))


class Poly:
    """A polynomial with exact rational coefficients.

    ``variables`` is the ordered tuple of symbol names; ``terms`` maps
    exponent tuples (one slot per variable) to nonzero coefficients.
    """

    __slots__ = ("variables", "terms", "_hash")

    def __init__(self, variables: Sequence[str], terms: Mapping[tuple[int, ...], Scalar]):
        vs = tuple(variables)
        clean: dict[tuple[int, ...], Fraction] = {}
        for expo, coeff in terms.items():
            c = Fraction(coeff)
            if c == 0:
                continue
            e = tuple(int(x) for x in expo)
            if len(e) != len(vs):
                raise DimensionMismatchError(
                    f"exponent tuple {e} does not match variable count {len(vs)}"
                )
            if any(x < 0 for x in e):
                raise DimensionMismatchError(f"negative exponent in {e}")
            clean[e] = clean.get(e, Fraction(0)) + c
        object.__setattr__(self, "variables", vs)
        object.__setattr__(self, "terms", {e: c for e, c in clean.items() if c != 0})
        object.__setattr__(self, "_hash", None)

    def __setattr__(self, name, value):
        raise AttributeError("Poly is immutable")

    # -- constructors -------------------------------------------------

    @classmethod
    def zero(cls, variables: Sequence[str]) -> "Poly":
        return cls(variables, {})

    @classmethod
    def constant(cls, variables: Sequence[str], value: Scalar) -> "Poly":
        n = len(tuple(variables))
        return cls(variables, {(0,) * n: Fraction(value)})

    @classmethod
    def variable(cls, variables: Sequence[str], name: str) -> "Poly":
        vs = tuple(variables)
        idx = vs.index(name)
        e = [0] * len(vs)
        e[idx] = 1
        return cls(vs, {tuple(e): Fraction(1)})

    # -- predicates ----------------------------------------------------

    def is_zero(self) -> bool:
        return not self.terms

    def is_constant(self) -> bool:
        return all(sum(e) == 0 for e in self.terms)

    def constant_term(self) -> Fraction:
        return self.terms.get((0,) * len(self.variables), Fraction(0))

    def total_degree(self) -> int:
        """Total degree; -1 for the zero polynomial."""
        if not self.terms:
            return -1
        return max(sum(e) for e in self.terms)

    def degree_in(self, name: str) -> int:
        if not self.terms:
            return -1
        i = self.variables.index(name)
        return max(e[i] for e in self.terms)

    # -- arithmetic ----------------------------------------------------

    def _coerce(self, other) -> "Poly":
        if isinstance(other, Poly):
            if other.variables != self.variables:
                raise DimensionMismatchError(
                    f"variable lists differ: {self.variables} vs {other.variables}"
                )
            return other
        return Poly.constant(self.variables, other)

    def __add__(self, other) -> "Poly":
        other = self._coerce(other)
        terms = dict(self.terms)
        for e, c in other.terms.items():
            terms[e] = terms.get(e, Fraction(0)) + c
        return Poly(self.variables, terms)

    __radd__ = __add__

    def __neg__(self) -> "Poly":
        return Poly(self.variables, {e: -c for e, c in self.terms.items()})

    def __sub__(self, other) -> "Poly":
        return self + (-self._coerce(other))

    def __rsub__(self, other) -> "Poly":
        return (-self) + other

    def __mul__(self, other) -> "Poly":
        if not isinstance(other, Poly):
            c = Fraction(other)
            return Poly(self.variables, {e: v * c for e, v in self.terms.items()})
        other = self._coerce(other)
        out: dict[tuple[int, ...], Fraction] = {}
        for e1, c1 in self.terms.items():
            for e2, c2 in other.terms.items():
                e = tuple(a + b for a, b in zip(e1, e2))
                out[e] = out.get(e, Fraction(0)) + c1 * c2
        return Poly(self.variables, out)

    __rmul__ = __mul__

    def __pow__(self, n: int) -> "Poly":
        if n < 0:
            raise DimensionMismatchError("negative power of a polynomial")
        result = Poly.constant(self.variables, 1)
        base = self
        while n:
            if n & 1:
                result = result * base
            base = base * base if n > 1 else base
            n >>= 1
        return result

    def diff(self, name: str) -> "Poly":
        i = self.variables.index(name)
        out: dict[tuple[int, ...], Fraction] = {}
        for e, c in self.terms.items():
            if e[i] == 0:
                continue
            d = list(e)
            d[i] -= 1
            out[tuple(d)] = out.get(tuple(d), Fraction(0)) + c * e[i]
        return Poly(self.variables, out)

    def truncate(self, max_total_degree: int) -> "Poly":
        """Drop every term of total degree above ``max_total_degree``."""
        return Poly(
            self.variables,
            {e: c for e, c in self.terms.items() if sum(e) <= max_total_degree},
        )

    def embedded(self, variables: Sequence[str]) -> "Poly":
        """Reinterpret over a larger variable list containing all current ones."""
        vs = tuple(variables)
        idx = []
        for v in self.variables:
            if v not in vs:
                raise DimensionMismatchError(f"variable {v} missing from target list")
            idx.append(vs.index(v))
        out: dict[tuple[int, ...], Fraction] = {}
        for e, c in self.terms.items():
            ne = [0] * len(vs)
            for j, exp in zip(idx, e):
                ne[j] += exp
            out[tuple(ne)] = out.get(tuple(ne), Fraction(0)) + c
        return Poly(vs, out)

    # -- equality / hashing / printing ---------------------------------

    def __eq__(self, other) -> bool:
        if isinstance(other, (int, Fraction)):
            other = Poly.constant(self.variables, other)
        if not isinstance(other, Poly):
            return NotImplemented
        return self.variables == other.variables and self.terms == other.terms

    def __hash__(self):
        h = self._hash
        if h is None:
            h = hash((self.variables, frozenset(self.terms.items())))
            object.__setattr__(self, "_hash", h)
        return h

    def sorted_terms(self) -> list[tuple[tuple[int, ...], Fraction]]:
        """Terms in descending degrevlex order (the canonical order)."""
        return sorted(self.terms.items(), key=lambda t: _grevlex_key(t[0]), reverse=True)

    def __str__(self) -> str:
        return format_polynomial(self)

    def __repr__(self) -> str:
        return f"Poly({format_polynomial(self)!r}, vars={self.variables})"


def format_polynomial(p: Poly) -> str:
    """Canonical text form: degrevlex order, explicit ``*`` and ``^``.

    The output parses back to the same polynomial.
    """
    if p.is_zero():
        return "0"
    pieces = []
    for e, c in p.sorted_terms():
        factors = []
        for name, exp in zip(p.variables, e):
            if exp == 1:
                factors.append(name)
            elif exp > 1:
                factors.append(f"{name}^{exp}")
        mono = "*".join(factors)
        ac = abs(c)
        if mono and ac == 1:
            body = mono
        elif mono:
            body = f"{ac}*{mono}"
        else:
            body = str(ac)
        pieces.append(("-" if c < 0 else "+", body))
    sign, body = pieces[0]
    out = ("-" if sign == "-" else "") + body
    for sign, body in pieces[1:]:
        out += f" {sign} {body}"
    return out


# ---------------------------------------------------------------------------
# Parsing
# ---------------------------------------------------------------------------

_TOKEN_RE = re.compile(
    r"\s*(?:(?P<int>\d+)|(?P<name>[A-Za-z_][A-Za-z0-9_]*)|(?P<op>[-+*^()/]))"
)


def _tokenize(text: str):
    pos = 0
    tokens = []
    while pos < len(text):
        m = _TOKEN_RE.match(text, pos)
        if not m or m.end() == pos:
            rest = text[pos:]
            if rest.strip() == "":
                break
            bad = pos + len(rest) - len(rest.lstrip())
            raise PolyParseError(f"unexpected character {text[bad]!r}", bad, text)
        if m.group("int") is not None:
            tokens.append(("int", m.group("int"), m.start("int")))
        elif m.group("name") is not None:
            tokens.append(("name", m.group("name"), m.start("name")))
        else:
            tokens.append(("op", m.group("op"), m.start("op")))
        pos = m.end()
    tokens.append(("end", "", len(text)))
    return tokens


class _Parser:
    def __init__(self, text: str, variables: tuple[str, ...]):
        self.text = text
        self.variables = variables
        self.tokens = _tokenize(text)
        self.i = 0

    def peek(self):
        return self.tokens[self.i]

    def advance(self):
        tok = self.tokens[self.i]
        self.i += 1
        return tok

    def expect_op(self, op: str):
        kind, val, pos = self.peek()
        if kind != "op" or val != op:
            raise PolyParseError(f"expected {op!r}", pos, self.text)
        return self.advance()

    def parse(self) -> Poly:
        p = self.expr()
        kind, val, pos = self.peek()
        if kind != "end":
            raise PolyParseError(f"unexpected trailing input {val!r}", pos, self.text)
        return p

    def expr(self) -> Poly:
        p = self.term()
        while True:
            kind, val, _ = self.peek()
            if kind == "op" and val in "+-":
                self.advance()
                q = self.term()
                p = p + q if val == "+" else p - q
            else:
                return p

    def term(self) -> Poly:
        p = self.factor()
        while True:
            kind, val, _ = self.peek()
            if kind == "op" and val == "*":
                self.advance()
                p = p * self.factor()
            else:
                return p

    def factor(self) -> Poly:
        sign = 1
        while True:
            kind, val, _ = self.peek()
            if kind == "op" and val in "+-":
                self.advance()
                if val == "-":
                    sign = -sign
            else:
                break
        p = self.power()
        return p if sign == 1 else -p

    def power(self) -> Poly:
        p = self.atom()
        kind, val, pos = self.peek()
        if kind == "op" and val == "^":
            self.advance()
            kind, val, pos = self.peek()
            if kind == "op" and val == "-":
                raise NegativeExponentError("negative exponent", pos, self.text)
            if kind != "int":
                raise PolyParseError("expected integer exponent after '^'", pos, self.text)
            self.advance()
            p = p ** int(val)
        return p

    def atom(self) -> Poly:
        kind, val, pos = self.advance()
        if kind == "int":
            num = int(val)
            k2, v2, _ = self.peek()
            if k2 == "op" and v2 == "/":
                self.advance()
                k3, v3, p3 = self.peek()
                if k3 != "int":
                    raise PolyParseError("expected integer denominator", p3, self.text)
                self.advance()
                den = int(v3)
                if den == 0:
                    raise PolyParseError("zero denominator", p3, self.text)
                return Poly.constant(self.variables, Fraction(num, den))
            return Poly.constant(self.variables, num)
        if kind == "name":
            if val not in self.variables:
                raise UnknownVariableError(f"unknown variable {val!r}", pos, self.text)
            return Poly.variable(self.variables, val)
        if kind == "op" and val == "(":
            p = self.expr()
            self.expect_op(")")
            return p
        raise PolyParseError(f"unexpected token {val!r}" if val else "unexpected end of input", pos, self.text)


def parse_polynomial(text: str, variables: Sequence[str]) -> Poly:
    """Parse ``text`` over the declared variables.

    Grammar: integers, rationals ``a/b``, variable names, ``+ - * ^`` and
    parentheses.  No implicit multiplication.
    """
    return _Parser(text, tuple(variables)).parse()


# ---------------------------------------------------------------------------
# Substitution
# ---------------------------------------------------------------------------

def substitute(
    p: Poly,
    assignment: Union[Mapping[str, Union[Poly, Scalar]], Iterable[tuple[str, Union[Poly, Scalar]]]],
    result_variables: Sequence[str] | None = None,
) -> Poly:
    """Exact composition: replace assigned variables by polynomials or scalars.

    Unassigned variables pass through. Assignments to symbols absent from
    ``p.variables`` are ignored.
    """
    if isinstance(assignment, Mapping):
        pairs = list(assignment.items())
    else:
        pairs = list(assignment)
        seen = set()
        for name, _ in pairs:
            if name in seen:
                raise SubstitutionError(f"variable {name!r} bound twice")
            seen.add(name)
    mapping = {name: val for name, val in pairs if name in p.variables}

    if result_variables is None:
        out_vars = [v for v in p.variables if v not in mapping]
        for _, val in pairs:
            if isinstance(val, Poly):
                for w in val.variables:
                    if w not in out_vars:
                        out_vars.append(w)
        out_vars = tuple(out_vars)
    else:
        out_vars = tuple(result_variables)

    n_out = len(out_vars)

    def _occurs(v: str) -> bool:
        i = p.variables.index(v)
        return any(e[i] > 0 for e in p.terms)

    # Fast path: every assigned value is a plain variable of the result ring.
    simple: dict[int, Optional[int]] = {}
    all_simple = True
    for i, v in enumerate(p.variables):
        if v in mapping:
            val = mapping[v]
            if isinstance(val, Poly) and len(val.terms) == 1:
                ((e, c),) = val.terms.items()
                if c == 1 and sum(e) == 1:
                    target = val.variables[e.index(1)]
                    if target in out_vars:
                        simple[i] = out_vars.index(target)
                        continue
            all_simple = False
            break
        else:
            if v not in out_vars:
                if _occurs(v):
                    raise SubstitutionError(
                        f"unassigned variable {v!r} missing from result list"
                    )
                simple[i] = None
            else:
                simple[i] = out_vars.index(v)
    if all_simple:
        out: dict[tuple[int, ...], Fraction] = {}
        for e, c in p.terms.items():
            ne = [0] * n_out
            for i, exp in enumerate(e):
                if exp:
                    ne[simple[i]] += exp
            key = tuple(ne)
            out[key] = out.get(key, Fraction(0)) + c
        return Poly(out_vars, out)

    images: list[Optional[Poly]] = []
    for v in p.variables:
        if v in mapping:
            val = mapping[v]
            img = val.embedded(out_vars) if isinstance(val, Poly) else Poly.constant(out_vars, val)
        else:
            if v not in out_vars:
                if _occurs(v):
                    raise SubstitutionError(
                        f"unassigned variable {v!r} missing from result list"
                    )
                img = None
            else:
                img = Poly.variable(out_vars, v)
        images.append(img)

    result = Poly.zero(out_vars)
    power_cache: list[dict[int, Poly]] = [dict() for _ in images]
    for e, c in p.terms.items():
        term = Poly.constant(out_vars, c)
        for i, exp in enumerate(e):
            if exp == 0:
                continue
            cache = power_cache[i]
            if exp not in cache:
                cache[exp] = images[i] ** exp
            term = term * cache[exp]
        result = result + term
    return result


# ---------------------------------------------------------------------------
# Jacobian minors
# ---------------------------------------------------------------------------

def _det(matrix: list[list[Poly]]) -> Poly:
    n = len(matrix)
    if n == 0:
        raise DimensionMismatchError("empty matrix")
    if n == 1:
        return matrix[0][0]
    vs = matrix[0][0].variables
    total = Poly.zero(vs)
    for j in range(n):
        entry = matrix[0][j]
        if entry.is_zero():
            continue
        minor = [[row[c] for c in range(n) if c != j] for row in matrix[1:]]
        sub = _det(minor)
        term = entry * sub
        total = total + term if j % 2 == 0 else total - term
    return total


def jacobian_minor_ideal(gens: Sequence[Poly], extra_linear: Sequence[Poly]) -> list[Poly]:
    """All maximal minors of the Jacobian matrix of ``gens + extra_linear``.

    Zero minors are dropped and duplicates collapsed.
    """
    rows = list(gens) + list(extra_linear)
    if not rows:
        return []
    vs = rows[0].variables
    for r in rows:
        if r.variables != vs:
            raise DimensionMismatchError("generators share no common variable list")
    nvars = len(vs)
    r = len(rows)
    if r > nvars:
        raise DimensionMismatchError(
            f"{r} functions exceed {nvars} variables; no maximal minors"
        )
    jac = [[row.diff(v) for v in vs] for row in rows]
    minors: list[Poly] = []
    seen = set()
    for cols in combinations(range(nvars), r):
        sub = [[jac[i][j] for j in cols] for i in range(r)]
        m = _det(sub)
        if m.is_zero():
            continue
        if m not in seen:
            seen.add(m)
            minors.append(m)
    return minors
