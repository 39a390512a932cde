"""Pure-Python fraction-free echelon kernel.

This is the reference implementation of the hot loop; ``_kernel`` (Cython)
must produce bit-identical output.
"""

from math import gcd


def _primitive(row):
    g = 0
    for x in row:
        if x:
            g = gcd(g, x)
            if g == 1:
                return row
    if g > 1:
        return [x // g for x in row]
    return row


def echelon(rows, ncols, reduced=True):
    """Integer row echelon form by fraction-free elimination.

    ``rows`` is a list of integer lists (not modified).  Pivots are chosen as
    the first nonzero entry in column order.  Every row is kept primitive
    (content 1) after each update.  With ``reduced`` the entries above each
    pivot are cleared too.

    Returns ``(rows, pivots)`` with zero rows removed.
    """
    m = [_primitive(list(r)) for r in rows]
    nrows = len(m)
    pivots = []
    r = 0
    for c in range(ncols):
        if r == nrows:
            break
        p = r
        while p < nrows and m[p][c] == 0:
            p += 1
        if p == nrows:
            continue
        if p != r:
            m[p], m[r] = m[r], m[p]
        prow = m[r]
        pv = prow[c]
        start = 0 if reduced else r + 1
        for i in range(start, nrows):
            if i == r:
                continue
            row = m[i]
            f = row[c]
            if f == 0:
                continue
            g = gcd(pv, f)
            a = pv // g
            b = f // g
            lo = 0 if i < r else c
            new = row[:lo] + [a * row[j] - b * prow[j] for j in range(lo, ncols)]
            m[i] = _primitive(new)
        pivots.append(c)
        r += 1
    return m[:r], pivots


def rank(rows, ncols):
    return len(echelon(rows, ncols, reduced=False)[1])
