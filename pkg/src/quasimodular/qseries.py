"""Exact truncated q-expansions: Eisenstein series, eta quotients, Hauptmoduln.

A :class:`QSeries` stores integer numerators over one common positive
denominator, so products reduce to integer convolutions (see ``kernels``).
``trunc`` is absolute: every coefficient of q^n with n < trunc is exact.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from math import comb, gcd
from typing import Dict, Iterable, List, Optional, Sequence, Tuple

from quasimodular import kernels
from quasimodular.derivation import check_generator, get_level, iterate_D
from quasimodular.exactalg import LaurentPoly, Number, as_rational
from quasimodular.report import Report


def _lcm(a: int, b: int) -> int:
    return a // gcd(a, b) * b


class QSeries:
    """sum_{n=lead}^{trunc-1} c_n q^n + O(q^trunc) with exact rational c_n."""

    __slots__ = ("_lead", "_nums", "_den", "_trunc")

    def __init__(self, lead: int, coefficients: Iterable = (), trunc: Optional[int] = None):
        coeffs = [as_rational(c) for c in coefficients]
        if trunc is None:
            trunc = lead + len(coeffs)
        if lead + len(coeffs) > trunc:
            coeffs = coeffs[: max(trunc - lead, 0)]
        den = 1
        for c in coeffs:
            den = _lcm(den, Fraction(c).denominator)
        nums = [int(Fraction(c) * den) for c in coeffs]
        self._set(lead, nums, den, trunc)

    def _set(self, lead: int, nums: List[int], den: int, trunc: int) -> None:
        i = 0
        while i < len(nums) and nums[i] == 0:
            i += 1
        nums = nums[i:]
        lead += i
        while nums and nums[-1] == 0:
            nums.pop()
        if not nums:
            lead, den = trunc, 1
        else:
            g = den
            for v in nums:
                g = gcd(g, v)
                if g == 1:
                    break
            if g > 1:
                nums = [v // g for v in nums]
                den //= g
        self._lead, self._nums, self._den, self._trunc = lead, nums, den, trunc

    @classmethod
    def _from_ints(cls, lead: int, nums: List[int], den: int, trunc: int) -> "QSeries":
        obj = cls.__new__(cls)
        if den < 0:
            nums, den = [-v for v in nums], -den
        obj._set(lead, list(nums[: max(trunc - lead, 0)]), den, trunc)
        return obj

    @classmethod
    def one(cls, trunc: int) -> "QSeries":
        return cls._from_ints(0, [1], 1, trunc)

    @classmethod
    def monomial(cls, exponent: int, coefficient=1, trunc: Optional[int] = None) -> "QSeries":
        t = exponent + 1 if trunc is None else trunc
        return cls(exponent, [coefficient], t)

    # -- inspection ------------------------------------------------------------
    @property
    def lead(self) -> int:
        """Exponent of the first nonzero coefficient (``trunc`` for the zero series)."""
        return self._lead

    @property
    def trunc(self) -> int:
        return self._trunc

    truncation_order = trunc

    def is_zero(self) -> bool:
        return not self._nums

    def coefficient(self, n: int) -> Fraction:
        if n >= self._trunc:
            raise IndexError(f"q^{n} is beyond the truncation order {self._trunc}")
        i = n - self._lead
        if 0 <= i < len(self._nums):
            return Fraction(self._nums[i], self._den)
        return Fraction(0)

    def coefficients(self, start: Optional[int] = None) -> List[Fraction]:
        """Coefficients from ``start`` (default ``lead``) up to ``trunc - 1``."""
        s = self._lead if start is None else start
        return [self.coefficient(n) for n in range(s, self._trunc)]

    def as_dict(self) -> Dict[int, Fraction]:
        return {self._lead + i: Fraction(v, self._den) for i, v in enumerate(self._nums) if v}

    def _dense(self, start: int, den: int, length: int) -> List[int]:
        """Numerators over ``den`` for exponents start .. start+length-1."""
        factor = den // self._den
        out = [0] * length
        off = self._lead - start
        for i, v in enumerate(self._nums):
            j = off + i
            if 0 <= j < length:
                out[j] = v * factor
        return out

    # -- arithmetic --------------------------------------------------------------
    def _coerce(self, other) -> Optional["QSeries"]:
        if isinstance(other, QSeries):
            return other
        if isinstance(other, (int, Fraction)):
            return QSeries(0, [other], max(self._trunc, 1))
        return None

    def __add__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        trunc = min(self._trunc, o._trunc)
        start = min(self._lead, o._lead, trunc)
        den = _lcm(self._den, o._den)
        n = trunc - start
        a, b = self._dense(start, den, n), o._dense(start, den, n)
        return QSeries._from_ints(start, [x + y for x, y in zip(a, b)], den, trunc)

    __radd__ = __add__

    def __neg__(self):
        return QSeries._from_ints(self._lead, [-v for v in self._nums], self._den, self._trunc)

    def __sub__(self, other):
        o = self._coerce(other)
        if o is None:
            return NotImplemented
        return self + (-o)

    def __rsub__(self, other):
        return (-self) + other

    def scale(self, c) -> "QSeries":
        c = Fraction(as_rational(c))
        return QSeries._from_ints(self._lead, [v * c.numerator for v in self._nums],
                                  self._den * c.denominator, self._trunc)

    def __mul__(self, other):
        if isinstance(other, (int, Fraction)):
            return self.scale(other)
        if not isinstance(other, QSeries):
            return NotImplemented
        if self.is_zero() or other.is_zero():
            trunc = min(self._trunc + other._lead, other._trunc + self._lead)
            return QSeries._from_ints(trunc, [], 1, trunc)
        lead = self._lead + other._lead
        trunc = min(self._trunc + other._lead, other._trunc + self._lead)
        nums = kernels.convolve(self._nums, other._nums, max(trunc - lead, 0))
        return QSeries._from_ints(lead, nums, self._den * other._den, trunc)

    __rmul__ = __mul__

    def inverse(self) -> "QSeries":
        """1/f; the truncation order becomes trunc - 2*lead."""
        if self.is_zero():
            raise ZeroDivisionError("series has no known nonzero coefficient")
        u = self._nums
        u0 = u[0]
        length = self._trunc - self._lead
        # scaled recurrence B'_n = u0^(n+1) B_n keeps everything integral
        b = [1] + [0] * (length - 1)
        powers = [1]
        for _ in range(length):
            powers.append(powers[-1] * u0)
        for n in range(1, length):
            s = 0
            for i in range(1, min(n, len(u) - 1) + 1):
                s += u[i] * powers[i - 1] * b[n - i]
            b[n] = -s
        top = powers[length] if length else 1
        nums = [bn * (top // powers[n + 1]) * self._den for n, bn in enumerate(b)]
        return QSeries._from_ints(-self._lead, nums, top, self._trunc - 2 * self._lead)

    def __truediv__(self, other):
        if isinstance(other, (int, Fraction)):
            return self.scale(1 / Fraction(other))
        if not isinstance(other, QSeries):
            return NotImplemented
        return self * other.inverse()

    def __rtruediv__(self, other):
        return self.inverse() * other

    def __pow__(self, n: int) -> "QSeries":
        if not isinstance(n, int):
            return NotImplemented
        if n < 0:
            return self.inverse() ** (-n)
        if n == 0:
            # q^0 u^0 is known to the relative precision of u
            return QSeries.one(self._trunc - self._lead if self._nums else self._trunc)
        base, result = self, None
        while n:
            if n & 1:
                result = base if result is None else result * base
            n >>= 1
            if n:
                base = base * base
        return result

    def theta(self) -> "QSeries":
        """q d/dq."""
        nums = [(self._lead + i) * v for i, v in enumerate(self._nums)]
        return QSeries._from_ints(self._lead, nums, self._den, self._trunc)

    def substitute_power(self, N: int) -> "QSeries":
        """f(q^N), i.e. tau -> N tau."""
        if N < 1:
            raise ValueError("N must be positive")
        nums = [0] * (N * (len(self._nums) - 1) + 1) if self._nums else []
        for i, v in enumerate(self._nums):
            nums[N * i] = v
        return QSeries._from_ints(N * self._lead, nums, self._den, N * self._trunc)

    def truncate(self, trunc: int) -> "QSeries":
        if trunc > self._trunc:
            raise ValueError(f"cannot raise the truncation order from {self._trunc} to {trunc}")
        return QSeries._from_ints(self._lead, self._nums, self._den, trunc)

    # -- comparison ------------------------------------------------------------
    def first_mismatch(self, other: "QSeries", below: Optional[int] = None) -> Optional[int]:
        """Smallest exponent below the common truncation order where the two differ."""
        limit = min(self._trunc, other._trunc)
        if below is not None:
            limit = min(limit, below)
        start = min(self._lead, other._lead)
        for n in range(start, limit):
            if self.coefficient(n) != other.coefficient(n):
                return n
        return None

    def agrees_with(self, other: "QSeries", below: Optional[int] = None) -> bool:
        return self.first_mismatch(other, below) is None

    def __eq__(self, other):
        if isinstance(other, QSeries):
            return (self._trunc == other._trunc and self._lead == other._lead
                    and self._den == other._den and self._nums == other._nums)
        return NotImplemented

    def __hash__(self):
        return hash((self._lead, self._trunc, self._den, tuple(self._nums)))

    # -- text ----------------------------------------------------------------------
    def serialize(self) -> str:
        coeffs = ", ".join(str(c) for c in self.coefficients())
        return f"{self._lead}; {self._trunc}; {coeffs}"

    @classmethod
    def deserialize(cls, text: str) -> "QSeries":
        try:
            lead, trunc, body = (part.strip() for part in text.split(";", 2))
            coeffs = [Fraction(c.strip()) for c in body.split(",")] if body else []
            return cls(int(lead), coeffs, int(trunc))
        except ValueError as exc:
            raise ValueError(f"malformed series text: {exc}") from None

    def __str__(self):
        parts = []
        for n, c in sorted(self.as_dict().items()):
            parts.append(f"{c}*q^{n}")
        parts.append(f"O(q^{self._trunc})")
        return " + ".join(parts)

    def __repr__(self):
        return f"QSeries({self.serialize()!r})"


# ---------------------------------------------------------------------------
# Eisenstein series


@lru_cache(maxsize=None)
def _bernoulli_table(k: int) -> Tuple[Fraction, ...]:
    B = [Fraction(1)]
    for n in range(1, k + 1):
        B.append(-sum(comb(n + 1, j) * B[j] for j in range(n)) / (n + 1))
    return tuple(B)


def bernoulli(k: int) -> Fraction:
    """B_k with B_1 = -1/2 convention (irrelevant for even k)."""
    if k < 2 or k % 2:
        raise ValueError("k must be an even integer >= 2")
    return _bernoulli_table(k)[k]


def divisor_sums(power: int, n: int) -> List[int]:
    """sigma_power(m) for m = 0 .. n-1 (entry 0 unused, set to 0)."""
    out = [0] * n
    for d in range(1, n):
        dp = d ** power
        for m in range(d, n, d):
            out[m] += dp
    return out


def _check_weight(k: int) -> None:
    if k < 2 or k % 2:
        raise ValueError("weight must be an even integer >= 2")


def _check_prec(prec: int) -> None:
    if prec < 1:
        raise ValueError("precision must be at least 1")


def eisenstein(k: int, prec: int) -> QSeries:
    """E_k = 1 - (2k/B_k) sum sigma_{k-1}(n) q^n, exact below q^prec."""
    _check_weight(k)
    _check_prec(prec)
    factor = -Fraction(2 * k) / bernoulli(k)
    sig = divisor_sums(k - 1, prec)
    return QSeries(0, [1] + [factor * s for s in sig[1:]], prec)


def eisenstein_fricke(level, k: int, prec: int) -> QSeries:
    """(E_k(tau) + N^(k/2) E_k(N tau)) / (1 + N^(k/2))."""
    lv = get_level(level)
    _check_weight(k)
    _check_prec(prec)
    base = eisenstein(k, prec)
    if lv.N == 1:
        return base
    w = lv.N ** (k // 2)
    shifted = base.substitute_power(lv.N).truncate(prec)
    return (base + shifted.scale(w)).scale(Fraction(1, 1 + w))


# ---------------------------------------------------------------------------
# eta quotients


@dataclass(frozen=True)
class EtaQuotientSpec:
    """prod eta(t tau)^e over the (t, e) pairs."""

    factors: Tuple[Tuple[int, int], ...]

    def __post_init__(self):
        factors = tuple((int(t), int(e)) for t, e in self.factors)
        object.__setattr__(self, "factors", factors)
        if any(t < 1 for t, _ in factors):
            raise ValueError("eta scales must be positive integers")
        if self.weight24 % 24:
            raise ValueError(f"sum t*e = {self.weight24} is not divisible by 24; "
                             "the q-power would be fractional")

    @property
    def weight24(self) -> int:
        return sum(t * e for t, e in self.factors)

    @property
    def leading_exponent(self) -> int:
        return self.weight24 // 24


@lru_cache(maxsize=64)
def _euler_product(length: int) -> Tuple[int, ...]:
    """prod_{n>=1} (1 - q^n) to ``length`` coefficients by direct multiplication."""
    out = [0] * length
    if length:
        out[0] = 1
    for n in range(1, length):
        for i in range(length - 1, n - 1, -1):
            out[i] -= out[i - n]
    return tuple(out)


def eta_quotient(spec: EtaQuotientSpec, prec: int) -> QSeries:
    _check_prec(prec)
    lead = spec.leading_exponent
    length = max(prec - lead, 0)
    result = QSeries.one(length)
    for t, e in spec.factors:
        if e == 0 or length == 0:
            continue
        euler = QSeries(0, _euler_product(length), length)
        if t > 1:
            euler = euler.substitute_power(t).truncate(length)
        result = result * (euler ** e)
    shifted = QSeries._from_ints(lead, result._dense(0, result._den, length), result._den, prec)
    return shifted


_HAUPTMODUL = {
    2: (EtaQuotientSpec(((1, 24), (2, -24))), 24, 2 ** 12, EtaQuotientSpec(((2, 24), (1, -24)))),
    3: (EtaQuotientSpec(((1, 12), (3, -12))), 12, 3 ** 6, EtaQuotientSpec(((3, 12), (1, -12)))),
}


def hauptmodul(level, prec: int) -> QSeries:
    """j_N = (eta(tau)/eta(N tau))^e + c + N^s (eta(N tau)/eta(tau))^e for N = 2, 3."""
    lv = get_level(level)
    if lv.N not in _HAUPTMODUL:
        raise ValueError("Hauptmoduln are provided for levels 2 and 3")
    _check_prec(prec)
    main, const, scale, inverse = _HAUPTMODUL[lv.N]
    return eta_quotient(main, prec) + const + eta_quotient(inverse, prec).scale(scale)


def delta_N(level, prec: int) -> QSeries:
    """(E_4^(N))^3 - (E_6^(N))^2."""
    e4 = eisenstein_fricke(level, 4, prec)
    e6 = eisenstein_fricke(level, 6, prec)
    return e4 ** 3 - e6 * e6


# ---------------------------------------------------------------------------
# identities


def _ramanujan_sides(N: int, prec: int) -> List[Tuple[str, QSeries, QSeries]]:
    E2, E4, E6 = (eisenstein_fricke(N, k, prec) for k in (2, 4, 6))
    F = Fraction
    if N == 1:
        rhs = [(E2 * E2 - E4) * F(1, 12), (E2 * E4 - E6) * F(1, 3), (E2 * E6 - E4 * E4) * F(1, 2)]
    elif N == 2:
        rhs = [(E2 * E2 - E4) * F(1, 8), (E2 * E4 - E6) * F(1, 2),
               (E2 * E6 * 3 - E4 * E4 * 2 - E6 * E6 / E4) * F(1, 4)]
    else:
        rhs = [(E2 * E2 - E4) * F(1, 6), (E2 * E4 - E6) * F(2, 3),
               (E2 * E6 * 2 - E4 * E4 - E6 * E6 / E4) * F(1, 2)]
    return [(name, e.theta(), r) for name, e, r in zip(("E2", "E4", "E6"), (E2, E4, E6), rhs)]


def verify_ramanujan(level, prec: int) -> Report:
    """The three closed forms for theta E_k^(N), compared exactly below q^prec."""
    lv = get_level(level)
    if prec < 2:
        raise ValueError("prec must be at least 2")
    report = Report()
    for name, lhs, rhs in _ramanujan_sides(lv.N, prec):
        bad = lhs.first_mismatch(rhs, prec)
        report.add(f"ramanujan N={lv.N} theta {name}", bad is None and rhs.trunc >= prec,
                   prec=prec, first_mismatch=bad)
    return report


class _PowerCache:
    def __init__(self, series: QSeries, inverse: Optional[QSeries] = None):
        self.pos = [QSeries.one(series.trunc), series]
        self.neg = [QSeries.one(series.trunc), inverse]

    def __call__(self, k: int) -> QSeries:
        table = self.pos if k >= 0 else self.neg
        k = abs(k)
        if table[1] is None:
            raise ZeroDivisionError("negative power of a series without inverse")
        while len(table) <= k:
            table.append(table[-1] * table[1])
        return table[k]


def rho_inverse_eval(p: LaurentPoly, level, prec: int) -> QSeries:
    """Substitute E_2^(N), E_4^(N), E_6^(N) for x, y, z."""
    lv = get_level(level)
    _check_prec(prec)
    E2, E4, E6 = (eisenstein_fricke(lv, k, prec) for k in (2, 4, 6))
    px, py, pz = _PowerCache(E2), _PowerCache(E4, E4.inverse()), _PowerCache(E6)
    total = QSeries(prec, [], prec)
    for (a, b, c), coef in p.terms.items():
        total = total + (px(a) * py(b) * pz(c)).scale(coef)
    return total


_GENERATOR_WEIGHT = {"x": 2, "y": 4, "z": 6}


def verify_rho_consistency(level, generator: str, n: int, prec: int, cache_dir=None) -> Report:
    """rho^-1 of D^n(g) against theta^n applied to the Eisenstein expansion of g."""
    lv = get_level(level)
    check_generator(generator)
    if n < 0 or prec < 2:
        raise ValueError("need n >= 0 and prec >= 2")
    report = Report()
    lhs = rho_inverse_eval(iterate_D(lv, generator, n, scaled=False, cache_dir=cache_dir), lv, prec)
    rhs = eisenstein_fricke(lv, _GENERATOR_WEIGHT[generator], prec)
    for _ in range(n):
        rhs = rhs.theta()
    bad = lhs.first_mismatch(rhs, prec)
    report.add(f"rho consistency N={lv.N} g={generator} n={n}", bad is None and lhs.trunc >= prec,
               prec=prec, first_mismatch=bad)
    return report


def rho_suite(level, n_max: int = 8, prec: int = 100, cache_dir=None) -> Report:
    report = Report()
    for g in ("x", "y", "z"):
        for n in range(n_max + 1):
            report.extend(verify_rho_consistency(level, g, n, prec, cache_dir=cache_dir))
    return report
