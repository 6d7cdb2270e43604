"""Pure-Python implementations of the hot exact-arithmetic kernels.

These are the reference versions; ``_ckernels.pyx`` mirrors them line for
line.  Both operate on raw term dictionaries mapping ``(a, b, c)`` exponent
tuples to exact coefficients (``int`` or ``Fraction``) and never store zero
coefficients in their output.
"""

EXP_MIN = -(2 ** 31)
EXP_MAX = 2 ** 31 - 1


def _bounds(terms):
    lo = [0, 0, 0]
    hi = [0, 0, 0]
    first = True
    for mono in terms:
        if first:
            lo = list(mono)
            hi = list(mono)
            first = False
            continue
        for i in range(3):
            e = mono[i]
            if e < lo[i]:
                lo[i] = e
            elif e > hi[i]:
                hi[i] = e
    return lo, hi


def _check_range(lo, hi):
    for i in range(3):
        if lo[i] < EXP_MIN or hi[i] > EXP_MAX:
            raise OverflowError("monomial exponent outside the 32-bit range")


def mul_terms(t1, t2):
    """Product of two sparse term maps."""
    if not t1 or not t2:
        return {}
    lo1, hi1 = _bounds(t1)
    lo2, hi2 = _bounds(t2)
    _check_range([lo1[i] + lo2[i] for i in range(3)],
                 [hi1[i] + hi2[i] for i in range(3)])
    out = {}
    get = out.get
    items2 = list(t2.items())
    for (a1, b1, c1), v1 in t1.items():
        for (a2, b2, c2), v2 in items2:
            key = (a1 + a2, b1 + b2, c1 + c2)
            out[key] = get(key, 0) + v1 * v2
    return {k: v for k, v in out.items() if v}


def derive_terms(terms, A, B):
    """Apply the integral Ramanujan derivation to a term map.

    The operator is ``(x^2 - y) d/dx + 4(xy - z) d/dy + (6xz - A y^2 - B z^2/y) d/dz``,
    which on a single monomial ``x^a y^b z^c`` gives::

        (a + 4b + 6c) x^(a+1) y^b z^c  -  a x^(a-1) y^(b+1) z^c
        - (4b + Bc) x^a y^(b-1) z^(c+1)  -  A c x^a y^(b+2) z^(c-1)
    """
    if not terms:
        return {}
    lo, hi = _bounds(terms)
    _check_range([lo[0] - 1, lo[1] - 1, lo[2] - 1], [hi[0] + 1, hi[1] + 2, hi[2] + 1])
    out = {}
    get = out.get
    for (a, b, c), v in terms.items():
        w = a + 4 * b + 6 * c
        if w:
            key = (a + 1, b, c)
            out[key] = get(key, 0) + w * v
        if a:
            key = (a - 1, b + 1, c)
            out[key] = get(key, 0) - a * v
        s = 4 * b + B * c
        if s:
            key = (a, b - 1, c + 1)
            out[key] = get(key, 0) - s * v
        if c:
            key = (a, b + 2, c - 1)
            out[key] = get(key, 0) - A * c * v
    return {k: v for k, v in out.items() if v}


def convolve(a, b, n):
    """First ``n`` coefficients of the product of two coefficient lists."""
    la = len(a)
    lb = len(b)
    out = [0] * n
    for i in range(min(la, n)):
        ai = a[i]
        if not ai:
            continue
        top = min(lb, n - i)
        for j in range(top):
            out[i + j] += ai * b[j]
    return out
