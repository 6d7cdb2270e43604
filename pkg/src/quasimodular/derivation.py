"""Ramanujan derivations on Q[x, y, z, 1/y] for the levels N = 1, 2, 3.

Under the isomorphism sending E_2, E_4, E_6 (of level N) to x, y, z, the
operator theta = q d/dq becomes

    D f = ((x^2 - y) f_x + 4(xy - z) f_y + (6xz - A y^2 - B z^2/y) f_z) / d

with A = 2m/(m-2) and B = 4(m-3)/(m-2).  The integral rescaling d*D is the
working form here; unscaled values are recovered by exact division.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Set, Tuple, Union

from quasimodular import kernels
from quasimodular.exactalg import (
    X,
    Y,
    Z,
    LaurentPoly,
    Monomial,
    Number,
    generator as _generator,
    weighted_degree,
)

GENERATORS = ("x", "y", "z")
GENERATOR_WTDEG = {"x": 1, "y": 2, "z": 3}


@dataclass(frozen=True)
class Level:
    N: int
    m: int
    d: int

    def __post_init__(self):
        if (self.N, self.m, self.d) not in {(1, 3, 12), (2, 4, 8), (3, 6, 6)}:
            raise ValueError(f"unsupported level constants {(self.N, self.m, self.d)}")

    @property
    def A(self) -> int:
        """Coefficient of -y^2 in the scaled z-component."""
        return Fraction(2 * self.m, self.m - 2).numerator

    @property
    def B(self) -> int:
        """Coefficient of -z^2/y in the scaled z-component."""
        return Fraction(4 * (self.m - 3), self.m - 2).numerator


LEVELS = {1: Level(1, 3, 12), 2: Level(2, 4, 8), 3: Level(3, 6, 6)}

LevelLike = Union[int, Level]


def get_level(level: LevelLike) -> Level:
    if isinstance(level, Level):
        return level
    try:
        return LEVELS[int(level)]
    except (KeyError, ValueError):
        raise ValueError(f"level must be one of 1, 2, 3, got {level!r}") from None


def check_generator(gen: str) -> str:
    if gen not in GENERATORS:
        raise ValueError(f"generator must be one of x, y, z, got {gen!r}")
    return gen


@dataclass(frozen=True)
class DerivationSpec:
    """Coefficient functions of the derivation; ``p, q, r`` are the scaled ones."""

    level: Level
    p: LaurentPoly
    q: LaurentPoly
    r: LaurentPoly

    def unscaled(self) -> Tuple[LaurentPoly, LaurentPoly, LaurentPoly]:
        d = self.level.d
        return self.p / d, self.q / d, self.r / d


def derivation_spec(level: LevelLike) -> DerivationSpec:
    lv = get_level(level)
    p = X * X - Y
    q = 4 * (X * Y - Z)
    r = 6 * X * Z - lv.A * Y * Y - lv.B * Z * Z / Y
    return DerivationSpec(lv, p, q, r)


def apply_D(level: LevelLike, f: LaurentPoly, scaled: bool = False) -> LaurentPoly:
    """Apply D (or d*D when ``scaled``) to ``f``."""
    lv = get_level(level)
    out = LaurentPoly.from_kernel(kernels.derive_terms(f.terms, lv.A, lv.B))
    if scaled:
        return out
    return out / lv.d


def apply_D_product_rule(level: LevelLike, f: LaurentPoly, scaled: bool = False) -> LaurentPoly:
    """Reference evaluation p*f_x + q*f_y + r*f_z by generic polynomial arithmetic."""
    spec = derivation_spec(level)
    p, q, r = (spec.p, spec.q, spec.r) if scaled else spec.unscaled()
    return p * f.diff("x") + q * f.diff("y") + r * f.diff("z")


def apply_D_tilde(level: LevelLike, f: LaurentPoly) -> LaurentPoly:
    """(2x f_x + 4y f_y + 6z f_z) / d."""
    lv = get_level(level)
    return (2 * X * f.diff("x") + 4 * Y * f.diff("y") + 6 * Z * f.diff("z")) / lv.d


def serre_derivative(level: LevelLike, k: int, f: LaurentPoly) -> LaurentPoly:
    """D f - (k/d) x f for f the image of a weight-k form."""
    lv = get_level(level)
    if k < 2 or k % 2:
        raise ValueError("weight must be an even integer >= 2")
    if weighted_degree(f) != k // 2:
        raise ValueError(f"expected a weighted-homogeneous polynomial of degree {k // 2}")
    return apply_D(lv, f) - Fraction(k, lv.d) * X * f


def iterate_D(level: LevelLike, generator: str, n: int, scaled: bool = True,
              cache_dir=None) -> LaurentPoly:
    """(d*D)^n applied to a generator, served from the persistent table.

    With ``scaled=False`` the result is D^n(generator) = (d*D)^n(generator) / d^n.
    """
    from quasimodular.tables import get_table

    lv = get_level(level)
    check_generator(generator)
    if n < 0:
        raise ValueError("iteration order must be non-negative")
    value = get_table(lv, generator, cache_dir)[n]
    if scaled:
        return value
    return value / (lv.d ** n)


def iterate_D_fresh(level: LevelLike, f: LaurentPoly, n: int, scaled: bool = True) -> LaurentPoly:
    """Uncached iteration, used for cache-coherence checks and arbitrary inputs."""
    for _ in range(n):
        f = apply_D(level, f, scaled=True)
    if scaled:
        return f
    return f / (get_level(level).d ** n)


def coefficient(level: LevelLike, generator: str, r: int, monomial: Monomial,
                cache_dir=None) -> Number:
    """Coefficient of x^a y^b z^c in (d*D)^r(generator)."""
    return iterate_D(level, generator, r, cache_dir=cache_dir).coefficient(tuple(monomial))


# ---------------------------------------------------------------------------
# denominators


def predicted_ell(level: LevelLike, r: int) -> int:
    """Power of y clearing the denominator of D^r x, by the level's closed form."""
    lv = get_level(level)
    if r < 0:
        raise ValueError("r must be non-negative")
    if lv.N == 1:
        return 0
    if lv.N == 2:
        return (r + 1) // 4
    # the residue condition is on the iteration order r
    base = (r + 1) // 2
    return base - 1 if r % 6 in (1, 2, 3) else base


_GENERATOR_SHIFT = {"x": 0, "y": 1, "z": 2}


def denominator_profile(level: LevelLike, generator: str, n: int, cache_dir=None) -> Tuple[int, int]:
    """(observed, predicted) exponent of y in the denominator of D^n(generator)."""
    from quasimodular.exactalg import reduced_form

    lv = get_level(level)
    check_generator(generator)
    observed = reduced_form(iterate_D(lv, generator, n, cache_dir=cache_dir)).ell
    predicted = predicted_ell(lv, n + _GENERATOR_SHIFT[generator])
    return observed, predicted


# ---------------------------------------------------------------------------
# lattice picture


@dataclass(frozen=True, order=True)
class LatticePoint:
    lam: int
    nu: int


def _base_point(generator: str) -> Tuple[int, int, int]:
    return {"x": (1, 0, 0), "y": (0, 1, 0), "z": (0, 0, 1)}[generator]


def lattice_to_monomial(point: LatticePoint, r: int, generator: str = "x") -> Tuple[Fraction, Fraction, Fraction]:
    """(a, b, c) = base + (0, r/2, 0) + T^-1 (lam, nu, 0)."""
    a0, b0, c0 = _base_point(generator)
    lam, nu = point.lam, point.nu
    return (Fraction(a0 + lam), Fraction(b0) + Fraction(r - lam + 3 * nu, 2), Fraction(c0 - nu))


def monomial_to_lattice(mono: Monomial, r: int, generator: str = "x") -> LatticePoint:
    a0, b0, c0 = _base_point(generator)
    a, b, c = mono
    lam = a - a0
    nu = c0 - c
    if (a0 + lam, Fraction(b0) + Fraction(r - lam + 3 * nu, 2), c0 - nu) != (a, b, c):
        raise ArithmeticError(f"monomial {mono} is not on the lattice for r={r}")
    return LatticePoint(lam, nu)


def lattice_points(level: LevelLike, generator: str, r: int, cache_dir=None) -> Set[LatticePoint]:
    check_generator(generator)
    table = iterate_D(level, generator, r, cache_dir=cache_dir)
    return {monomial_to_lattice(m, r, generator) for m in table.terms}


def generator_poly(name: str) -> LaurentPoly:
    return _generator(check_generator(name))
