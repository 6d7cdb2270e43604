# cython: language_level=3, boundscheck=False, wraparound=False
"""Compiled twins of the kernels in ``_pykernels``.

Exponents are unpacked into C integers; coefficients stay Python objects
(arbitrary-precision ``int`` or ``Fraction``).
"""

cdef long long EXP_MIN = -(2 ** 31)
cdef long long EXP_MAX = 2 ** 31 - 1


cdef inline void _check(long long a, long long b, long long c) except *:
    if a < EXP_MIN or a > EXP_MAX or b < EXP_MIN or b > EXP_MAX \
            or c < EXP_MIN or c > EXP_MAX:
        raise OverflowError("monomial exponent outside the 32-bit range")


cdef inline _acc(dict out, tuple key, object v):
    cdef object old = out.get(key)
    if old is None:
        out[key] = v
    else:
        out[key] = old + v


def mul_terms(dict t1, dict t2):
    cdef dict out = {}
    cdef list items2
    cdef long long a1, b1, c1, a2, b2, c2
    cdef tuple m1, m2
    cdef object v1, v2
    if not t1 or not t2:
        return {}
    items2 = [(m, v) for m, v in t2.items()]
    for m1, v1 in t1.items():
        a1 = m1[0]
        b1 = m1[1]
        c1 = m1[2]
        for m2, v2 in items2:
            a2 = m2[0] + a1
            b2 = m2[1] + b1
            c2 = m2[2] + c1
            _check(a2, b2, c2)
            _acc(out, (a2, b2, c2), v1 * v2)
    return {k: v for k, v in out.items() if v}


def derive_terms(dict terms, object A, object B):
    cdef dict out = {}
    cdef long long a, b, c, w, s, ia, iB, iA
    cdef tuple m
    cdef object v
    iA = A
    iB = B
    for m, v in terms.items():
        a = m[0]
        b = m[1]
        c = m[2]
        _check(a + 1, b + 2, c + 1)
        _check(a - 1, b - 1, c - 1)
        w = a + 4 * b + 6 * c
        if w:
            _acc(out, (a + 1, b, c), w * v)
        if a:
            _acc(out, (a - 1, b + 1, c), -a * v)
        s = 4 * b + iB * c
        if s:
            _acc(out, (a, b - 1, c + 1), -s * v)
        if c:
            _acc(out, (a, b + 2, c - 1), -(iA * c) * v)
    return {k: v for k, v in out.items() if v}


def convolve(list a, list b, Py_ssize_t n):
    cdef Py_ssize_t la = len(a)
    cdef Py_ssize_t lb = len(b)
    cdef Py_ssize_t i, j, top
    cdef list out = [0] * n
    cdef object ai
    for i in range(min(la, n)):
        ai = a[i]
        if not ai:
            continue
        top = min(lb, n - i)
        for j in range(top):
            out[i + j] = out[i + j] + ai * b[j]
    return out
