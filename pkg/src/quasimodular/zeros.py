"""Zeros of theta^j E_k^(N) in the upper half-plane by the argument principle.

Forms are evaluated from their exact Fourier coefficients in double precision
at q = exp(2 pi i tau).  Counting integrates f'/f around rectangles with
adaptive Gauss-Legendre panels; locating subdivides until each cell holds one
zero, takes the centroid integral as a start, and polishes with Newton.
"""

from __future__ import annotations

import csv
import io
import json
import math
from dataclasses import asdict, dataclass
from functools import lru_cache
from typing import Iterator, List, Optional, Sequence, Tuple

import numpy as np

from quasimodular.qseries import bernoulli, eisenstein_fricke
from quasimodular.report import Report

IM_FLOOR = 0.2
DEFAULT_TERMS = 120
SIMPLICITY_THRESHOLD = 1e-4
RESIDUAL_TOL = 1e-9
SCALE_RADIUS = 0.05
BOUNDARY_RATIO = 1e-8
JITTER = 0.001
MAX_JITTER_TRIES = 5
ROUNDING_LIMIT = 0.25

_PANEL_BUDGET = 6000
_MAX_DEPTH = 40
_GL_NODES, _GL_WEIGHTS = np.polynomial.legendre.leggauss(16)
_TWO_PI_I = 2j * math.pi


class ZeroSearchError(RuntimeError):
    """Quadrature or Newton failure; ``diagnostics`` says where."""

    def __init__(self, message: str, **diagnostics):
        super().__init__(message)
        self.diagnostics = diagnostics


class BoundaryZeroError(ZeroSearchError):
    pass


@dataclass(frozen=True)
class RegionSpec:
    re_min: float
    re_max: float
    im_min: float
    im_max: float

    def __post_init__(self):
        if not (self.re_min < self.re_max and self.im_min < self.im_max):
            raise ValueError("region must have re_min < re_max and im_min < im_max")
        if self.im_min < IM_FLOOR:
            raise ValueError(f"im_min must be at least {IM_FLOOR}")

    @classmethod
    def strip(cls) -> "RegionSpec":
        return cls(-0.5, 0.5, 0.3, 2.0)

    @classmethod
    def around(cls, center: complex, half_width: float) -> "RegionSpec":
        return cls(center.real - half_width, center.real + half_width,
                   center.imag - half_width, center.imag + half_width)

    def contains(self, tau: complex, slack: float = 0.0) -> bool:
        return (self.re_min - slack <= tau.real <= self.re_max + slack
                and self.im_min - slack <= tau.imag <= self.im_max + slack)

    def corners(self) -> Tuple[complex, complex, complex, complex]:
        return (complex(self.re_min, self.im_min), complex(self.re_max, self.im_min),
                complex(self.re_max, self.im_max), complex(self.re_min, self.im_max))

    def shifted(self, dre: float, dim: float) -> "RegionSpec":
        return RegionSpec(self.re_min + dre, self.re_max + dre,
                          max(self.im_min + dim, IM_FLOOR), self.im_max + dim)

    def split(self, fraction: float) -> Tuple["RegionSpec", "RegionSpec"]:
        """Cut across the longer side at ``fraction`` of its length."""
        if self.re_max - self.re_min >= self.im_max - self.im_min:
            cut = self.re_min + fraction * (self.re_max - self.re_min)
            return (RegionSpec(self.re_min, cut, self.im_min, self.im_max),
                    RegionSpec(cut, self.re_max, self.im_min, self.im_max))
        cut = self.im_min + fraction * (self.im_max - self.im_min)
        return (RegionSpec(self.re_min, self.re_max, self.im_min, cut),
                RegionSpec(self.re_min, self.re_max, cut, self.im_max))

    @property
    def diameter(self) -> float:
        return math.hypot(self.re_max - self.re_min, self.im_max - self.im_min)


# deterministic jitter pattern, in units of JITTER
_JITTER_PATTERN = ((1, 1), (-1, -1), (1, -1), (-1, 1), (2, 1))


def jittered(region: RegionSpec) -> Iterator[RegionSpec]:
    yield region
    for dre, dim in _JITTER_PATTERN[:MAX_JITTER_TRIES]:
        yield region.shifted(dre * JITTER, dim * JITTER)


@dataclass(frozen=True)
class FormSelector:
    """theta^j E_k^(N)."""

    N: int
    k: int
    j: int = 0

    def __post_init__(self):
        if self.N not in (1, 2, 3):
            raise ValueError("level must be 1, 2 or 3")
        if self.k not in (2, 4, 6):
            raise ValueError("k must be 2, 4 or 6")
        if self.j < 0:
            raise ValueError("j must be non-negative")

    def label(self) -> str:
        return f"theta^{self.j} E{self.k}^({self.N})"


@dataclass(frozen=True)
class ZeroRecord:
    location: complex
    residual: float
    derivative_magnitude: float
    scale: float
    simple: bool
    winding: int = 1

    @property
    def ratio(self) -> float:
        return self.derivative_magnitude / self.scale

    def to_dict(self) -> dict:
        d = asdict(self)
        d["location"] = [self.location.real, self.location.imag]
        return d


# ---------------------------------------------------------------------------
# evaluation


@lru_cache(maxsize=256)
def _coefficients(sel: FormSelector, terms: int) -> Tuple[np.ndarray, np.ndarray]:
    series = eisenstein_fricke(sel.N, sel.k, terms)
    n = np.arange(terms, dtype=float)
    c = np.array([float(series.coefficient(i)) for i in range(terms)]) * n ** sel.j
    if sel.j == 0:
        c[0] = 1.0
    return c, c * n


def _check_floor(tau) -> None:
    if np.any(np.imag(tau) < IM_FLOOR - 1e-12):
        raise ValueError(f"evaluation requires Im(tau) >= {IM_FLOOR}")


def _horner(coeffs: np.ndarray, q):
    return np.polynomial.polynomial.polyval(q, coeffs)


def tail_bound(sel: FormSelector, tau: complex, terms: int) -> float:
    """Bound on the omitted sum over n >= terms.

    |c_n| <= (2k/|B_k|) n^(k+j) because sigma_{k-1}(n) <= n^k and the level-N
    combination is a convex average; the tail is then dominated by a geometric
    series once ((n+1)/n)^(k+j) |q| < 1.
    """
    r = math.exp(-2 * math.pi * tau.imag)
    p = sel.k + sel.j
    K = float(2 * sel.k / abs(bernoulli(sel.k)))
    ratio = ((terms + 1) / terms) ** p * r
    if ratio >= 1:
        return math.inf
    return K * terms ** p * r ** terms / (1 - ratio)


def eval_form(sel: FormSelector, tau, terms: int = DEFAULT_TERMS, convention: str = "theta"):
    """Partial sum of theta^j E_k^(N) at ``tau`` and a bound on the omitted tail.

    ``convention="dtau"`` returns d^j/dtau^j instead, i.e. the theta value
    times (2 pi i)^j; the zero sets agree.
    """
    if terms < 1:
        raise ValueError("terms must be positive")
    scalar = np.isscalar(tau)
    t = np.asarray(tau, dtype=complex)
    _check_floor(t)
    c, _ = _coefficients(sel, terms)
    value = _horner(c, np.exp(_TWO_PI_I * t))
    tails = np.vectorize(lambda z: tail_bound(sel, complex(z), terms))(t) if not scalar \
        else tail_bound(sel, complex(tau), terms)
    if convention == "dtau":
        factor = _TWO_PI_I ** sel.j
        value = value * factor
        tails = tails * abs(factor)
    elif convention != "theta":
        raise ValueError("convention must be 'theta' or 'dtau'")
    if scalar:
        return complex(value), float(tails)
    return value, tails


def eval_with_derivative(sel: FormSelector, tau, terms: int = DEFAULT_TERMS):
    """f and df/dtau (theta convention for f)."""
    t = np.asarray(tau, dtype=complex)
    _check_floor(t)
    c, nc = _coefficients(sel, terms)
    q = np.exp(_TWO_PI_I * t)
    return _horner(c, q), _TWO_PI_I * _horner(nc, q)


# ---------------------------------------------------------------------------
# contour integrals


def eval_derivative(sel: FormSelector, tau, order: int, terms: int = DEFAULT_TERMS):
    """d^order/dtau^order of theta^j E_k^(N)."""
    t = np.asarray(tau, dtype=complex)
    _check_floor(t)
    c, _ = _coefficients(sel, terms)
    n = np.arange(terms, dtype=float)
    return _TWO_PI_I ** order * _horner(c * n ** order, np.exp(_TWO_PI_I * t))


def _panel(sel, a: complex, b: complex, terms: int, center: complex, moments: int):
    half = (b - a) / 2
    taus = (a + b) / 2 + half * _GL_NODES
    f, df = eval_with_derivative(sel, taus, terms)
    wg = _GL_WEIGHTS * half * df / f
    shifted = taus - center
    out = np.empty(moments + 1, dtype=complex)
    power = np.ones_like(shifted)
    for p in range(moments + 1):
        out[p] = np.sum(wg * power)
        power = power * shifted
    return out, np.abs(f)


def _edge(sel, a, b, terms, tol, depth, stats, center, moments):
    stats["panels"] += 3
    if stats["panels"] > _PANEL_BUDGET:
        raise ZeroSearchError("quadrature budget exhausted", edge=(a, b))
    whole, mags = _panel(sel, a, b, terms, center, moments)
    m = (a + b) / 2
    left, lm = _panel(sel, a, m, terms, center, moments)
    right, rm = _panel(sel, m, b, terms, center, moments)
    # a zero on or next to the contour shows up as a deep dip within one panel;
    # smooth decay towards the cusp does not
    for mg in (mags, lm, rm):
        lo, hi = float(mg.min()), float(mg.max())
        stats["fmin"] = min(stats["fmin"], lo)
        stats["fmax"] = max(stats["fmax"], hi)
        if lo < BOUNDARY_RATIO * hi or hi == 0.0:
            raise BoundaryZeroError("|f| nearly vanishes on the contour", edge=(a, b),
                                    fmin=lo, local_scale=hi)
    halves = left + right
    if abs(halves[0] - whole[0]) < tol:
        return halves
    if depth >= _MAX_DEPTH:
        stats["unconverged"] = True
        return halves
    return (_edge(sel, a, m, terms, tol, depth + 1, stats, center, moments)
            + _edge(sel, m, b, terms, tol, depth + 1, stats, center, moments))


def contour_integrals(sel: FormSelector, region: RegionSpec, terms: int = DEFAULT_TERMS,
                      tol: float = 1e-11, moments: int = 1):
    """(1/2 pi i) * integral of (tau - c)^p f'/f around ``region`` for p = 0..moments.

    ``c`` is the rectangle center; entry 0 is the winding number and entry p
    the power sum of (zero - c)^p over the enclosed zeros.
    """
    corners = region.corners()
    center = complex((region.re_min + region.re_max) / 2, (region.im_min + region.im_max) / 2)
    stats = {"fmin": math.inf, "fmax": 0.0, "unconverged": False, "panels": 0, "center": center}
    total = np.zeros(moments + 1, dtype=complex)
    pieces = 4
    for i in range(4):
        a, b = corners[i], corners[(i + 1) % 4]
        for s in range(pieces):
            total += _edge(sel, a + (b - a) * s / pieces, a + (b - a) * (s + 1) / pieces,
                           terms, tol, 0, stats, center, moments)
    return total / _TWO_PI_I, stats


def _winding(sel, region, terms, moments: int = 1):
    """(count, center, power sums p = 1..moments) for a clean contour."""
    sums, stats = contour_integrals(sel, region, terms, moments=moments)
    w = sums[0]
    n = round(w.real)
    dist = max(abs(w.real - n), abs(w.imag))
    if stats["unconverged"] or dist > ROUNDING_LIMIT or n < 0:
        raise ZeroSearchError("winding number is not close to an integer", region=region,
                              winding=complex(w), distance=dist)
    return int(n), stats["center"], sums[1:]


def count_zeros_rect(sel: FormSelector, region: RegionSpec, terms: int = DEFAULT_TERMS,
                     return_region: bool = False):
    """Zeros (with multiplicity) inside ``region``, jittering away from boundary zeros."""
    last = None
    for candidate in jittered(region):
        try:
            n, _, _ = _winding(sel, candidate, terms)
        except ZeroSearchError as exc:
            last = exc
            continue
        return (n, candidate) if return_region else n
    raise ZeroSearchError(f"no admissible contour near {region} after {MAX_JITTER_TRIES} jitters",
                          **(last.diagnostics if last else {}))


# ---------------------------------------------------------------------------
# locating


_SPLITS = (0.4713, 0.5287, 0.4129, 0.5871, 0.3557)
CLUSTER_RADIUS = 1e-6


def _roots_from_power_sums(sums: np.ndarray, m: int) -> np.ndarray:
    """Roots of prod (t - z_i) from p_k = sum z_i^k, k = 1..m (Newton's identities)."""
    e = [1.0 + 0j]
    for k in range(1, m + 1):
        acc = sum((-1) ** (i - 1) * e[k - i] * sums[i - 1] for i in range(1, k + 1))
        e.append(acc / k)
    coeffs = [(-1) ** k * e[k] for k in range(m + 1)]
    return np.roots(coeffs)


def _newton(sel, start: complex, terms: int, cell: RegionSpec, order: int = 0,
            max_iter: int = 60) -> complex:
    """Newton on the ``order``-th derivative (order = multiplicity - 1)."""
    tau = start
    for _ in range(max_iter):
        if tau.imag < IM_FLOOR:
            break
        g = eval_derivative(sel, tau, order, terms)
        dg = eval_derivative(sel, tau, order + 1, terms)
        step = complex(g / dg)
        tau -= step
        if abs(step) < 1e-15 * max(1.0, abs(tau)):
            break
    slack = 0.05 * cell.diameter + 1e-9
    if not (tau.imag >= IM_FLOOR and cell.contains(tau, slack)):
        raise ZeroSearchError("Newton left its cell", cell=cell, start=start, end=tau)
    return tau


def local_scale(sel: FormSelector, tau: complex, terms: int = DEFAULT_TERMS) -> float:
    """max(1, max |f| on the circle of radius SCALE_RADIUS about ``tau``)."""
    ring = tau + SCALE_RADIUS * np.exp(2j * np.pi * np.arange(32) / 32)
    ring = ring[np.imag(ring) >= IM_FLOOR]
    f, _ = eval_with_derivative(sel, ring, terms)
    return max(1.0, float(np.abs(f).max()))


def _record(sel, tau: complex, winding: int, terms: int) -> ZeroRecord:
    f, df = eval_with_derivative(sel, tau, terms)
    scale = local_scale(sel, tau, terms)
    dmag = float(abs(df))
    return ZeroRecord(tau, float(abs(f)), dmag, scale,
                      winding == 1 and dmag / scale > SIMPLICITY_THRESHOLD, winding)


def _finish(sel, cell, start, multiplicity, terms, tol, out):
    tau = _newton(sel, start, terms, cell, order=multiplicity - 1)
    rec = _record(sel, tau, multiplicity, terms)
    if rec.residual > tol:
        raise ZeroSearchError("Newton residual above tolerance", cell=cell,
                              location=tau, residual=rec.residual)
    out.append(rec)


def _locate_cell(sel, cell: RegionSpec, count: int, terms: int, tol: float, depth: int,
                 out: List[ZeroRecord]) -> None:
    if count == 0:
        return
    n, center, sums = _winding(sel, cell, terms, moments=count)
    if count == 1:
        _finish(sel, cell, center + complex(sums[0]), 1, terms, tol, out)
        return
    roots = _roots_from_power_sums(sums, count)
    spread = float(np.max(np.abs(roots - roots.mean())))
    if spread < CLUSTER_RADIUS or cell.diameter < 1e-5 or depth > 60:
        # one point of multiplicity ``count``: no split separates it
        _finish(sel, cell, center + complex(sums[0]) / count, count, terms, tol, out)
        return
    for frac in _SPLITS:
        a, b = cell.split(frac)
        try:
            na, _, _ = _winding(sel, a, terms)
            nb, _, _ = _winding(sel, b, terms)
        except ZeroSearchError:
            continue
        if na + nb != count:
            continue
        _locate_cell(sel, a, na, terms, tol, depth + 1, out)
        _locate_cell(sel, b, nb, terms, tol, depth + 1, out)
        return
    raise ZeroSearchError("could not split cell cleanly", cell=cell, count=count)


def locate_zeros(sel: FormSelector, region: RegionSpec, tol: float = RESIDUAL_TOL,
                 terms: int = DEFAULT_TERMS) -> List[ZeroRecord]:
    """All zeros in ``region`` (or its jittered replacement), sorted by location.

    A record's ``winding`` is its multiplicity; multiple zeros are reported,
    never split into fabricated simple ones.
    """
    return list(_locate_cached(sel, region, tol, terms))


@lru_cache(maxsize=512)
def _locate_cached(sel, region, tol, terms) -> Tuple[ZeroRecord, ...]:
    count, used = count_zeros_rect(sel, region, terms, return_region=True)
    out: List[ZeroRecord] = []
    _locate_cell(sel, used, count, terms, tol, 0, out)
    total = sum(r.winding for r in out)
    if total != count:
        raise ZeroSearchError("located zeros do not match the region count",
                              count=count, located=total)
    return tuple(sorted(out, key=lambda r: (round(r.location.real, 9), round(r.location.imag, 9))))


def simplicity_report(sel: FormSelector, region: RegionSpec = None,
                      terms: int = DEFAULT_TERMS) -> List[ZeroRecord]:
    """Located zeros with their verdicts; multi-zero cells were already split."""
    return locate_zeros(sel, region or RegionSpec.strip(), terms=terms)


def _periodic_distance(a: complex, b: complex) -> float:
    d = a - b
    return min(abs(d + s) for s in (-1, 0, 1))


def common_zero_scan(sel_a: FormSelector, sel_b: FormSelector, region: RegionSpec = None,
                     tol: float = 1e-6, terms: int = DEFAULT_TERMS):
    """Pairs of zeros (one of each form) closer than ``tol``, modulo tau -> tau + 1."""
    region = region or RegionSpec.strip()
    za = locate_zeros(sel_a, region, terms=terms)
    zb = locate_zeros(sel_b, region, terms=terms)
    hits = []
    for ra in za:
        for rb in zb:
            d = _periodic_distance(ra.location, rb.location)
            if d < tol:
                hits.append((ra.location, rb.location, d))
    return hits


def arc_deviation(level: int, k: int, region: RegionSpec = None,
                  terms: int = DEFAULT_TERMS) -> Tuple[float, List[ZeroRecord]]:
    """max | |tau| - 1/sqrt(N) | over the zeros of E_k^(N) in ``region``."""
    if level not in (2, 3) or k not in (4, 6):
        raise ValueError("arc check is for N in {2, 3} and k in {4, 6}")
    zs = locate_zeros(FormSelector(level, k, 0), region or RegionSpec.strip(), terms=terms)
    radius = 1 / math.sqrt(level)
    dev = max((abs(abs(z.location) - radius) for z in zs), default=0.0)
    return dev, zs


# ---------------------------------------------------------------------------
# suites


def simplicity_checks(sel: FormSelector, region: RegionSpec = None, tol: float = RESIDUAL_TOL,
                      terms: int = DEFAULT_TERMS) -> Report:
    region = region or RegionSpec.strip()
    report = Report()
    try:
        zs = locate_zeros(sel, region, tol, terms)
    except ZeroSearchError as exc:
        report.add(f"zeros {sel.label()} located", False, note=str(exc), **exc.diagnostics)
        return report
    bad = [z.to_dict() for z in zs if not (z.simple and z.residual < tol)]
    report.add(f"zeros {sel.label()} simple", not bad, zeros=len(zs),
               multiplicity=sum(z.winding for z in zs),
               min_ratio=min((z.ratio for z in zs), default=None),
               max_residual=max((z.residual for z in zs), default=None), offending=bad,
               note="" if not bad else "multiple or ill-conditioned zero in region")
    return report


def known_zero_checks(tol: float = 1e-9, terms: int = DEFAULT_TERMS) -> Report:
    report = Report()
    rho = complex(0.5, math.sqrt(3) / 2)
    for sel, target in ((FormSelector(1, 4), rho), (FormSelector(1, 6), 1j)):
        zs = locate_zeros(sel, RegionSpec.around(target, 0.1), terms=terms)
        err = min((abs(z.location - target) for z in zs), default=math.inf)
        report.add(f"known zero {sel.label()} at {target:.6f}", len(zs) == 1 and err < tol,
                   error=err, zeros=len(zs))
    for N in (2, 3):
        for k in (4, 6):
            dev, zs = arc_deviation(N, k, terms=terms)
            report.add(f"arc |tau| = 1/sqrt({N}) for E{k}^({N})", dev < tol, deviation=dev,
                       zeros=len(zs), note="" if zs else "no zero inside the default strip")
    return report


def common_zero_checks(levels: Sequence[int] = (2, 3), i_max: int = 4, tol: float = 1e-6,
                       region: RegionSpec = None, terms: int = DEFAULT_TERMS) -> Report:
    report = Report()
    for N in levels:
        for i in range(i_max + 1):
            for j in range(i + 1, i_max + 1):
                a, b = FormSelector(N, 2, i), FormSelector(N, 2, j)
                try:
                    hits = common_zero_scan(a, b, region, tol, terms)
                except ZeroSearchError as exc:
                    report.add(f"common zeros {a.label()} / {b.label()}", False, note=str(exc))
                    continue
                report.add(f"common zeros {a.label()} / {b.label()}", not hits, tol=tol,
                           hits=[[h[0], h[1], h[2]] for h in hits])
    return report


def zeros_suite(levels: Sequence[int] = (2, 3), j_max: int = 4, region: RegionSpec = None,
                tol: float = RESIDUAL_TOL, terms: int = DEFAULT_TERMS) -> Report:
    report = Report()
    for N in levels:
        for k in (2, 4, 6):
            for j in range(j_max + 1):
                report.extend(simplicity_checks(FormSelector(N, k, j), region, tol, terms))
    report.extend(known_zero_checks(terms=terms))
    report.extend(common_zero_checks(levels, region=region, terms=terms))
    return report


# ---------------------------------------------------------------------------
# output


def zeros_to_csv(records: Sequence[ZeroRecord]) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(["re", "im", "residual", "deriv_mag", "simple"])
    for r in records:
        writer.writerow([repr(r.location.real), repr(r.location.imag), repr(r.residual),
                         repr(r.derivative_magnitude), str(r.simple).lower()])
    return buf.getvalue()


def zeros_to_json(records: Sequence[ZeroRecord]) -> str:
    return json.dumps([r.to_dict() for r in records], indent=2)


def plot_points(records: Sequence[ZeroRecord]) -> List[List[float]]:
    return [[r.location.real, r.location.imag] for r in records]
