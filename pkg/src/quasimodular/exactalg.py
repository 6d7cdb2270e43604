"""Exact sparse Laurent polynomials in x, y, z over the rationals.

Exponents of ``x`` and ``z`` are non-negative; the exponent of ``y`` may be
any integer.  Coefficients are Python ``int`` when integral and
``fractions.Fraction`` otherwise, so integral tables stay on the fast
integer path.

Canonical term order: weighted degree ``a + 2b + 3c`` descending, then the
``x`` exponent descending, then the ``z`` exponent ascending.  This is the
order used by :func:`format_poly` and the "leading term" everywhere else.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from fractions import Fraction
from functools import reduce
from math import gcd, lcm
from typing import Iterable, Mapping, Optional, Tuple, Union

from quasimodular import kernels

Rational = Fraction
Monomial = Tuple[int, int, int]
Number = Union[int, Fraction]

VARS = ("x", "y", "z")
_VAR_INDEX = {"x": 0, "y": 1, "z": 2}
EXP_MIN = -(2 ** 31)
EXP_MAX = 2 ** 31 - 1

# deterministic specialization values for coprimality_certificate
_SPECIALIZATION_PRIMES = (2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41, 43, 47, 53)
_MAX_SPECIALIZATION_TRIES = 8


class PolySyntaxError(ValueError):
    """Malformed polynomial text; ``position`` is the 0-based offset."""

    def __init__(self, message: str, position: int):
        super().__init__(f"{message} at position {position}")
        self.position = position


class ExponentOverflowError(OverflowError):
    pass


def as_rational(value) -> Number:
    """Coerce to the canonical coefficient type (int if integral)."""
    if isinstance(value, bool):
        value = int(value)
    if isinstance(value, int):
        return value
    if isinstance(value, Fraction):
        return value.numerator if value.denominator == 1 else value
    if isinstance(value, str):
        return as_rational(Fraction(value))
    if isinstance(value, float):
        raise TypeError("floating-point coefficients are not exact")
    return as_rational(Fraction(value))


def _clean(value: Number) -> Number:
    if type(value) is Fraction and value.denominator == 1:
        return value.numerator
    return value


def wtdeg_of(mono: Monomial) -> int:
    return mono[0] + 2 * mono[1] + 3 * mono[2]


def canonical_key(mono: Monomial):
    a, b, c = mono
    return (-(a + 2 * b + 3 * c), -a, c, -b)


def _check_exponent(e: int):
    if e < EXP_MIN or e > EXP_MAX:
        raise ExponentOverflowError(f"exponent {e} outside the 32-bit range")


class LaurentPoly:
    """Immutable sparse element of Q[x, y, z, 1/y]."""

    __slots__ = ("_terms", "_hash")

    def __init__(self, terms: Optional[Mapping[Monomial, object]] = None):
        clean = {}
        if terms:
            for mono, coef in terms.items():
                a, b, c = (int(e) for e in mono)
                if a < 0 or c < 0:
                    raise ValueError(f"negative exponent of x or z in {mono}")
                for e in (a, b, c):
                    _check_exponent(e)
                coef = as_rational(coef)
                if coef:
                    key = (a, b, c)
                    coef = _clean(clean.get(key, 0) + coef)
                    if coef:
                        clean[key] = coef
                    else:
                        clean.pop(key, None)
        self._terms = clean
        self._hash = None

    @classmethod
    def from_kernel(cls, terms: dict) -> "LaurentPoly":
        """Wrap a kernel result (nonzero coefficients, valid exponents)."""
        return cls._raw({m: _clean(v) for m, v in terms.items()})

    @classmethod
    def _raw(cls, terms: dict) -> "LaurentPoly":
        obj = cls.__new__(cls)
        obj._terms = terms
        obj._hash = None
        return obj

    # constructors --------------------------------------------------------
    @classmethod
    def const(cls, c) -> "LaurentPoly":
        c = as_rational(c)
        return cls._raw({(0, 0, 0): c} if c else {})

    @classmethod
    def var(cls, name: str) -> "LaurentPoly":
        mono = [0, 0, 0]
        mono[_VAR_INDEX[name]] = 1
        return cls._raw({tuple(mono): 1})

    @classmethod
    def monomial(cls, a: int, b: int, c: int, coef=1) -> "LaurentPoly":
        return cls({(a, b, c): coef})

    # inspection ----------------------------------------------------------
    @property
    def terms(self) -> Mapping[Monomial, Number]:
        return self._terms

    def items(self):
        """Terms in canonical order."""
        return sorted(self._terms.items(), key=lambda kv: canonical_key(kv[0]))

    def coefficient(self, mono: Monomial) -> Number:
        return self._terms.get(tuple(mono), 0)

    def leading_term(self) -> Tuple[Monomial, Number]:
        if not self._terms:
            raise ValueError("zero polynomial has no leading term")
        mono = min(self._terms, key=canonical_key)
        return mono, self._terms[mono]

    def is_zero(self) -> bool:
        return not self._terms

    def is_constant(self) -> bool:
        return not self._terms or set(self._terms) == {(0, 0, 0)}

    def is_polynomial(self) -> bool:
        return all(m[1] >= 0 for m in self._terms)

    def degree(self, var: str) -> int:
        i = _VAR_INDEX[var]
        if not self._terms:
            return -1
        return max(m[i] for m in self._terms)

    def min_degree(self, var: str) -> int:
        i = _VAR_INDEX[var]
        if not self._terms:
            return 0
        return min(m[i] for m in self._terms)

    def involves(self, var: str) -> bool:
        i = _VAR_INDEX[var]
        return any(m[i] for m in self._terms)

    def weighted_degree(self) -> Optional[int]:
        return weighted_degree(self)

    def __len__(self):
        return len(self._terms)

    def __bool__(self):
        return bool(self._terms)

    # arithmetic ----------------------------------------------------------
    def _coerce(self, other) -> Optional["LaurentPoly"]:
        if isinstance(other, LaurentPoly):
            return other
        if isinstance(other, (int, Fraction)):
            return LaurentPoly.const(other)
        return None

    def __add__(self, other):
        other = self._coerce(other)
        if other is None:
            return NotImplemented
        return poly_add(self, other)

    __radd__ = __add__

    def __neg__(self):
        return LaurentPoly._raw({m: -v for m, v in self._terms.items()})

    def __pos__(self):
        return self

    def __sub__(self, other):
        other = self._coerce(other)
        if other is None:
            return NotImplemented
        return poly_add(self, -other)

    def __rsub__(self, other):
        other = self._coerce(other)
        if other is None:
            return NotImplemented
        return poly_add(other, -self)

    def __mul__(self, other):
        if isinstance(other, (int, Fraction)):
            return self.scale(other)
        if isinstance(other, LaurentPoly):
            return poly_mul(self, other)
        return NotImplemented

    __rmul__ = __mul__

    def __truediv__(self, other):
        if isinstance(other, (int, Fraction)):
            if not other:
                raise ZeroDivisionError("division of a polynomial by zero")
            return self.scale(Fraction(1) / other)
        if isinstance(other, LaurentPoly):
            if len(other) == 1:
                (mono, coef), = other._terms.items()
                return poly_mul(self, LaurentPoly._raw({(-mono[0], -mono[1], -mono[2]): _clean(Fraction(1) / coef)}))._checked()
            return exact_divide(self, other)
        return NotImplemented

    def _checked(self) -> "LaurentPoly":
        for a, _, c in self._terms:
            if a < 0 or c < 0:
                raise ArithmeticError("result has a negative power of x or z")
        return self

    def __pow__(self, n: int):
        if not isinstance(n, int):
            return NotImplemented
        if n < 0:
            if len(self) != 1:
                raise ValueError("only monomials have negative powers")
            return (LaurentPoly.const(1) / self) ** (-n)
        result = LaurentPoly.const(1)
        base = self
        while n:
            if n & 1:
                result = result * base
            n >>= 1
            if n:
                base = base * base
        return result

    def scale(self, c) -> "LaurentPoly":
        c = as_rational(c)
        if not c:
            return LaurentPoly._raw({})
        if c == 1:
            return self
        return LaurentPoly._raw({m: _clean(v * c) for m, v in self._terms.items()})

    def mul_monomial(self, mono: Monomial) -> "LaurentPoly":
        da, db, dc = mono
        return LaurentPoly({(a + da, b + db, c + dc): v for (a, b, c), v in self._terms.items()})

    def diff(self, var: str) -> "LaurentPoly":
        return partial_derivative(self, var)

    def map_coefficients(self, fn) -> "LaurentPoly":
        return LaurentPoly({m: fn(v) for m, v in self._terms.items()})

    def evaluate(self, x, y, z):
        """Substitute values (any ring supporting ``*``, ``+`` and ``**``)."""
        total = 0
        for (a, b, c), v in self._terms.items():
            total = total + v * (x ** a) * (y ** b) * (z ** c)
        return total

    # comparison / display --------------------------------------------------
    def __eq__(self, other):
        other = self._coerce(other)
        if other is None:
            return NotImplemented
        return self._terms == other._terms

    def __hash__(self):
        if self._hash is None:
            self._hash = hash(frozenset(self._terms.items()))
        return self._hash

    def __str__(self):
        return format_poly(self)

    def __repr__(self):
        return f"LaurentPoly({format_poly(self)!r})"


X = LaurentPoly.var("x")
Y = LaurentPoly.var("y")
Z = LaurentPoly.var("z")
ONE = LaurentPoly.const(1)
ZERO = LaurentPoly.const(0)


def generator(name: str) -> LaurentPoly:
    return LaurentPoly.var(name)


@dataclass(frozen=True)
class ReducedForm:
    """``numerator / y**ell`` with ``numerator`` a true polynomial."""

    numerator: LaurentPoly
    ell: int

    def value(self) -> LaurentPoly:
        return self.numerator.mul_monomial((0, -self.ell, 0))


# ---------------------------------------------------------------------------
# ring operations


def poly_add(p: LaurentPoly, q: LaurentPoly) -> LaurentPoly:
    if len(p) < len(q):
        p, q = q, p
    out = dict(p._terms)
    for m, v in q._terms.items():
        s = out.get(m, 0) + v
        if s:
            out[m] = _clean(s)
        else:
            out.pop(m, None)
    return LaurentPoly._raw(out)


def poly_mul(p: LaurentPoly, q: LaurentPoly) -> LaurentPoly:
    try:
        terms = kernels.mul_terms(p._terms, q._terms)
    except OverflowError as exc:
        raise ExponentOverflowError(str(exc)) from None
    return LaurentPoly._raw({m: _clean(v) for m, v in terms.items()})


def partial_derivative(p: LaurentPoly, var: str) -> LaurentPoly:
    i = _VAR_INDEX[var]
    out = {}
    for mono, v in p._terms.items():
        e = mono[i]
        if e:
            m = list(mono)
            m[i] = e - 1
            out[tuple(m)] = _clean(e * v)
    return LaurentPoly._raw(out)


def weighted_degree(p: LaurentPoly) -> Optional[int]:
    """Common value of ``a + 2b + 3c`` over all terms, or None if mixed/zero."""
    degs = {wtdeg_of(m) for m in p._terms}
    if len(degs) != 1:
        return None
    return degs.pop()


def reduced_form(p: LaurentPoly) -> ReducedForm:
    if not p:
        return ReducedForm(p, 0)
    ell = max(0, -p.min_degree("y"))
    return ReducedForm(p.mul_monomial((0, ell, 0)) if ell else p, ell)


# ---------------------------------------------------------------------------
# content, normalization, exact division


def _rational_content(p: LaurentPoly) -> Fraction:
    """Positive rational c with p / c having coprime integer coefficients."""
    coefs = list(p._terms.values())
    if not coefs:
        return Fraction(0)
    nums = [Fraction(v).numerator for v in coefs]
    dens = [Fraction(v).denominator for v in coefs]
    return Fraction(abs(reduce(gcd, nums)), reduce(lcm, dens))


def normalize(p: LaurentPoly) -> LaurentPoly:
    """Primitive over Z with positive leading coefficient (canonical order)."""
    if not p:
        return p
    c = _rational_content(p)
    if p.leading_term()[1] < 0:
        c = -c
    return p.scale(1 / c)


def _require_polynomial(p: LaurentPoly, what: str):
    if not p.is_polynomial():
        raise ValueError(f"{what} requires a polynomial without negative powers of y")


def _lex_leading(terms: Mapping[Monomial, Number]) -> Monomial:
    return max(terms)


def exact_divide(p: LaurentPoly, d: LaurentPoly) -> LaurentPoly:
    """Quotient ``p / d`` in Q[x, y, z]; raises ArithmeticError if inexact."""
    if not d:
        raise ZeroDivisionError("division by the zero polynomial")
    _require_polynomial(p, "exact_divide")
    _require_polynomial(d, "exact_divide")
    rem = dict(p._terms)
    dlead = _lex_leading(d._terms)
    dcoef = d._terms[dlead]
    dterms = list(d._terms.items())
    quot = {}
    while rem:
        lead = _lex_leading(rem)
        shift = (lead[0] - dlead[0], lead[1] - dlead[1], lead[2] - dlead[2])
        if min(shift) < 0:
            raise ArithmeticError("polynomial division is not exact")
        coef = _clean(Fraction(rem[lead]) / dcoef)
        quot[shift] = coef
        for m, v in dterms:
            key = (m[0] + shift[0], m[1] + shift[1], m[2] + shift[2])
            s = rem.get(key, 0) - coef * v
            if s:
                rem[key] = _clean(s)
            else:
                rem.pop(key, None)
    return LaurentPoly._raw(quot)


def divides(d: LaurentPoly, p: LaurentPoly) -> bool:
    try:
        exact_divide(p, d)
    except ArithmeticError:
        return False
    return True


def coefficients_in(p: LaurentPoly, var: str) -> dict:
    """``{k: coefficient of var**k}`` with coefficients free of ``var``."""
    i = _VAR_INDEX[var]
    out = {}
    for mono, v in p._terms.items():
        k = mono[i]
        m = list(mono)
        m[i] = 0
        out.setdefault(k, {})[tuple(m)] = v
    return {k: LaurentPoly._raw(t) for k, t in out.items()}


def _var_power(var: str, k: int) -> Monomial:
    m = [0, 0, 0]
    m[_VAR_INDEX[var]] = k
    return tuple(m)


def content_primitive(p: LaurentPoly, var: str):
    """Split ``p = content * primitive`` viewing p as univariate in ``var``.

    The content collects the rational content and the gcd of the coefficient
    polynomials; the primitive part has coprime integer coefficients, unit
    polynomial content, and a positive leading coefficient.
    """
    _require_polynomial(p, "content_primitive")
    if not p:
        return ZERO, ZERO
    others = [v for v in VARS if v != var]
    coeffs = list(coefficients_in(p, var).values())
    g = coeffs[0]
    for c in coeffs[1:]:
        if g.is_constant():
            break
        g = _gcd_rec(g, c, others)
    g = normalize(g) if not g.is_constant() else ONE
    prim = exact_divide(p, g) if g != ONE else p
    c = _rational_content(prim)
    if prim.leading_term()[1] < 0:
        c = -c
    prim = prim.scale(1 / c)
    return g.scale(c), prim


# ---------------------------------------------------------------------------
# gcd


def _prem(a: LaurentPoly, b: LaurentPoly, var: str) -> LaurentPoly:
    """Pseudo-remainder of a by b as univariate polynomials in ``var``."""
    db = b.degree(var)
    lcb = coefficients_in(b, var)[db]
    r = a
    while r and r.degree(var) >= db:
        dr = r.degree(var)
        lcr = coefficients_in(r, var)[dr]
        r = lcb * r - (lcr * b).mul_monomial(_var_power(var, dr - db))
    return r


def _primitive_in(p: LaurentPoly, var: str, rest) -> Tuple[LaurentPoly, LaurentPoly]:
    coeffs = list(coefficients_in(p, var).values())
    g = coeffs[0]
    for c in coeffs[1:]:
        if g.is_constant():
            break
        g = _gcd_rec(g, c, rest)
    if g.is_constant():
        return ONE, normalize(p)
    g = normalize(g)
    return g, normalize(exact_divide(p, g))


def _gcd_rec(p: LaurentPoly, q: LaurentPoly, vars_) -> LaurentPoly:
    if not p:
        return normalize(q) if q else ZERO
    if not q:
        return normalize(p)
    if p.is_constant() or q.is_constant():
        return ONE
    active = [v for v in vars_ if p.involves(v) or q.involves(v)]
    if not active:
        return ONE
    var = active[-1]
    rest = active[:-1]
    if not p.involves(var):
        return _gcd_rec(p, _primitive_in(q, var, rest)[0] if q.involves(var) else q, rest)
    if not q.involves(var):
        return _gcd_rec(_primitive_in(p, var, rest)[0], q, rest)
    cp, pp = _primitive_in(p, var, rest)
    cq, pq = _primitive_in(q, var, rest)
    c = _gcd_rec(cp, cq, rest) if rest else ONE
    a, b = (pp, pq) if pp.degree(var) >= pq.degree(var) else (pq, pp)
    while True:
        if b.degree(var) == 0:
            g = ONE
            break
        r = _prem(a, b, var)
        if not r:
            g = b
            break
        if not r.involves(var):
            g = ONE
            break
        a, b = b, _primitive_in(r, var, rest)[1]
    return normalize(c * g)


def gcd_multivariate(p: LaurentPoly, q: LaurentPoly) -> LaurentPoly:
    """Normalized gcd in Q[x, y, z] (recursive primitive PRS, z then y then x)."""
    _require_polynomial(p, "gcd_multivariate")
    _require_polynomial(q, "gcd_multivariate")
    if not p and not q:
        raise ValueError("gcd of two zero polynomials is undefined")
    if not p:
        return normalize(q)
    if not q:
        return normalize(p)
    if coprimality_certificate(p, q):
        return ONE
    return _gcd_rec(p, q, list(VARS))


# ---------------------------------------------------------------------------
# certificate


def _specialize(p: LaurentPoly, var: str, values: dict) -> list:
    """Dense coefficient list (low to high) of p with the other variables fixed."""
    i = _VAR_INDEX[var]
    deg = p.degree(var)
    out = [Fraction(0)] * (deg + 1)
    for mono, v in p._terms.items():
        val = Fraction(v)
        for name, x in values.items():
            e = mono[_VAR_INDEX[name]]
            if e:
                val *= Fraction(x) ** e
        out[mono[i]] += val
    return out


def _trim(u: list) -> list:
    while u and not u[-1]:
        u.pop()
    return u


def univariate_gcd(u: list, w: list) -> list:
    """Monic gcd of two dense coefficient lists over Q (low to high)."""
    u = _trim([Fraction(c) for c in u])
    w = _trim([Fraction(c) for c in w])
    while w:
        inv = 1 / w[-1]
        r = list(u)
        while len(r) >= len(w) and r:
            f = r[-1] * inv
            shift = len(r) - len(w)
            for k, c in enumerate(w):
                r[shift + k] -= f * c
            r.pop()
            _trim(r)
        u, w = w, r
    if not u:
        return []
    lead = u[-1]
    return [c / lead for c in u]


def coprimality_certificate(p: LaurentPoly, q: LaurentPoly) -> bool:
    """True only if gcd(p, q) is provably constant by specialization.

    For each variable v the other two are set to small primes at which the
    leading coefficients (in v) of p and q do not vanish; a constant univariate
    gcd in v rules out v from any common factor.  False means inconclusive.
    """
    _require_polynomial(p, "coprimality_certificate")
    _require_polynomial(q, "coprimality_certificate")
    if not p or not q:
        return False
    for var in VARS:
        others = [v for v in VARS if v != var]
        dp, dq = p.degree(var), q.degree(var)
        if dp == 0 and dq == 0:
            continue
        for attempt in range(_MAX_SPECIALIZATION_TRIES):
            values = {others[0]: _SPECIALIZATION_PRIMES[2 * attempt],
                      others[1]: _SPECIALIZATION_PRIMES[2 * attempt + 1]}
            up = _specialize(p, var, values)
            uq = _specialize(q, var, values)
            if up[-1] and uq[-1]:
                break
        else:
            return False
        if len(univariate_gcd(up, uq)) > 1:
            return False
    return True


# ---------------------------------------------------------------------------
# text format

_TOKEN = re.compile(r"\s*(?:(?P<num>\d+)|(?P<var>[xyz])|(?P<op>[-+*/^]))")


def _format_coef(c: Number) -> str:
    if isinstance(c, Fraction):
        return f"{c.numerator}/{c.denominator}"
    return str(c)


def format_poly(p: LaurentPoly) -> str:
    """Canonical text, e.g. ``2*x^3 - 6*x*y + 4*z`` or ``y^-2*z^5``."""
    if not p:
        return "0"
    parts = []
    for i, (mono, coef) in enumerate(p.items()):
        neg = coef < 0
        mag = -coef if neg else coef
        factors = []
        for name, e in zip(VARS, mono):
            if e == 1:
                factors.append(name)
            elif e:
                factors.append(f"{name}^{e}")
        if mag != 1 or not factors:
            factors.insert(0, _format_coef(_clean(mag)))
        body = "*".join(factors)
        if i == 0:
            parts.append(("-" if neg else "") + body)
        else:
            parts.append((" - " if neg else " + ") + body)
    return "".join(parts)


class _Parser:
    def __init__(self, text: str):
        self.text = text
        self.tokens = []
        pos = 0
        n = len(text)
        while pos < n:
            if text[pos].isspace():
                pos += 1
                continue
            m = _TOKEN.match(text, pos)
            if not m or m.end() == pos:
                raise PolySyntaxError(f"unexpected character {text[pos]!r}", pos)
            kind = m.lastgroup
            start = m.start(kind)
            self.tokens.append((kind, m.group(kind), start))
            pos = m.end()
        self.i = 0

    def peek(self):
        return self.tokens[self.i] if self.i < len(self.tokens) else (None, None, len(self.text))

    def take(self):
        tok = self.peek()
        self.i += 1
        return tok

    def expect_int(self) -> int:
        kind, val, pos = self.take()
        if kind != "num":
            raise PolySyntaxError("expected an integer", pos)
        return int(val)

    def parse(self) -> LaurentPoly:
        terms = {}
        sign = 1
        kind, val, pos = self.peek()
        if kind is None:
            raise PolySyntaxError("empty polynomial", pos)
        if kind == "op" and val in "+-":
            self.take()
            sign = -1 if val == "-" else 1
        while True:
            coef, mono = self.term()
            key = tuple(mono)
            s = terms.get(key, 0) + sign * coef
            if s:
                terms[key] = s
            else:
                terms.pop(key, None)
            kind, val, pos = self.peek()
            if kind is None:
                break
            if kind == "op" and val in "+-":
                self.take()
                sign = -1 if val == "-" else 1
                continue
            raise PolySyntaxError(f"unexpected token {val!r}", pos)
        return LaurentPoly(terms)

    def term(self):
        coef = Fraction(1)
        mono = [0, 0, 0]
        while True:
            kind, val, pos = self.peek()
            if kind == "num":
                self.take()
                num = Fraction(int(val))
                k2, v2, p2 = self.peek()
                if k2 == "op" and v2 == "/":
                    self.take()
                    den = self.expect_int()
                    if den == 0:
                        raise PolySyntaxError("zero denominator", p2)
                    num /= den
                coef *= num
            elif kind == "var":
                self.take()
                exp = 1
                k2, v2, p2 = self.peek()
                if k2 == "op" and v2 == "^":
                    self.take()
                    neg = False
                    k3, v3, p3 = self.peek()
                    if k3 == "op" and v3 == "-":
                        self.take()
                        neg = True
                    exp = self.expect_int()
                    if neg:
                        if val != "y":
                            raise PolySyntaxError(f"negative exponent on {val}", p3)
                        exp = -exp
                idx = _VAR_INDEX[val]
                mono[idx] += exp
                if mono[idx] < EXP_MIN or mono[idx] > EXP_MAX:
                    raise ExponentOverflowError(f"exponent of {val} overflows at position {pos}")
            else:
                what = "end of input" if kind is None else repr(val)
                raise PolySyntaxError(f"expected a coefficient or variable, got {what}", pos)
            kind, val, pos = self.peek()
            if kind == "op" and val == "*":
                self.take()
                continue
            break
        return coef, mono


def parse_poly(text: str) -> LaurentPoly:
    """Parse the canonical text grammar (see :func:`format_poly`)."""
    return _Parser(text).parse()


def as_poly(value) -> LaurentPoly:
    if isinstance(value, LaurentPoly):
        return value
    if isinstance(value, str):
        return parse_poly(value)
    return LaurentPoly.const(value)


def polys(texts: Iterable[str]):
    return [parse_poly(t) for t in texts]
