# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled fraction-free echelon kernel.

Runs the elimination on a C ``long long`` buffer with overflow checks.  When an
intermediate entry leaves the safe range the whole computation is redone by the
pure-Python kernel, so results are always exact and bit-identical to it.
"""

from libc.stdlib cimport malloc, free

from bundlelab import _kernel_py

cdef extern from *:
    """
    static int bl_mul_ovf(long long a, long long b, long long *r) {
        return __builtin_mul_overflow(a, b, r);
    }
    static int bl_sub_ovf(long long a, long long b, long long *r) {
        return __builtin_sub_overflow(a, b, r);
    }
    """
    int bl_mul_ovf(long long a, long long b, long long *r) nogil
    int bl_sub_ovf(long long a, long long b, long long *r) nogil

cdef long long LIMIT = 1LL << 62


cdef inline long long _gcd(long long a, long long b) noexcept nogil:
    if a < 0:
        a = -a
    if b < 0:
        b = -b
    while b:
        a, b = b, a % b
    return a


cdef int _make_primitive(long long *row, Py_ssize_t ncols) noexcept nogil:
    cdef long long g = 0
    cdef Py_ssize_t j
    for j in range(ncols):
        if row[j] != 0:
            g = _gcd(g, row[j])
            if g == 1:
                return 0
    if g > 1:
        for j in range(ncols):
            row[j] = row[j] // g
    return 0


cdef int _echelon_ll(long long *m, Py_ssize_t nrows, Py_ssize_t ncols,
                     bint reduced, Py_ssize_t *pivots, Py_ssize_t *npiv) noexcept nogil:
    """Returns 1 on overflow, 0 on success."""
    cdef Py_ssize_t r = 0, c, p, i, j, lo, start
    cdef long long pv, f, g, a, b, t1, t2, t
    cdef long long *prow
    cdef long long *row
    for i in range(nrows):
        _make_primitive(m + i * ncols, ncols)
    for c in range(ncols):
        if r == nrows:
            break
        p = r
        while p < nrows and m[p * ncols + c] == 0:
            p += 1
        if p == nrows:
            continue
        if p != r:
            for j in range(ncols):
                t = m[p * ncols + j]
                m[p * ncols + j] = m[r * ncols + j]
                m[r * ncols + j] = t
        prow = m + r * ncols
        pv = prow[c]
        start = 0 if reduced else r + 1
        for i in range(start, nrows):
            if i == r:
                continue
            row = m + i * ncols
            f = row[c]
            if f == 0:
                continue
            g = _gcd(pv, f)
            a = pv // g
            b = f // g
            lo = 0 if i < r else c
            for j in range(lo, ncols):
                if bl_mul_ovf(a, row[j], &t1):
                    return 1
                if bl_mul_ovf(b, prow[j], &t2):
                    return 1
                if bl_sub_ovf(t1, t2, &t):
                    return 1
                if t > LIMIT or t < -LIMIT:
                    return 1
                row[j] = t
            _make_primitive(row, ncols)
        pivots[r] = c
        r += 1
    npiv[0] = r
    return 0


def echelon(rows, Py_ssize_t ncols, bint reduced=True):
    """Same contract as ``_kernel_py.echelon``."""
    cdef Py_ssize_t nrows = len(rows)
    cdef Py_ssize_t i, j, npiv = 0
    cdef long long *m
    cdef Py_ssize_t *pivots
    cdef int overflow
    if nrows == 0 or ncols == 0:
        return [], []
    for r_ in rows:
        for x in r_:
            if x > LIMIT or x < -LIMIT:
                return _kernel_py.echelon(rows, ncols, reduced)
    m = <long long *> malloc(nrows * ncols * sizeof(long long))
    pivots = <Py_ssize_t *> malloc(nrows * sizeof(Py_ssize_t))
    if m == NULL or pivots == NULL:
        free(m)
        free(pivots)
        raise MemoryError()
    try:
        for i in range(nrows):
            r_ = rows[i]
            for j in range(ncols):
                m[i * ncols + j] = r_[j]
        with nogil:
            overflow = _echelon_ll(m, nrows, ncols, reduced, pivots, &npiv)
        if overflow:
            return _kernel_py.echelon(rows, ncols, reduced)
        out = [[m[i * ncols + j] for j in range(ncols)] for i in range(npiv)]
        return out, [pivots[i] for i in range(npiv)]
    finally:
        free(m)
        free(pivots)


def rank(rows, Py_ssize_t ncols):
    return len(echelon(rows, ncols, False)[1])
