"""Exact kernel computation over the rationals."""

from fractions import Fraction
from math import lcm

try:
    from gmpy2 import mpz as _int
except ImportError:  # pragma: no cover - optional speed-up
    _int = int

__all__ = ["nullspace"]


def nullspace(rows):
    """Basis of the right kernel of a rational matrix given as row lists.

    The matrix is scaled to integers and reduced to echelon form by
    fraction-free (Bareiss) elimination, so intermediate entries stay
    integral and every division is exact.  Each returned Fraction vector has
    a 1 in its own free coordinate and 0 in the others.
    """
    rows = [[Fraction(x) for x in r] for r in rows]
    if not rows:
        return []
    den = 1
    for r in rows:
        for x in r:
            den = lcm(den, x.denominator)
    a = [[_int(x.numerator * (den // x.denominator)) for x in r] for r in rows]
    m, n = len(a), len(a[0])
    prev = _int(1)
    pivots = []
    r = 0
    for c in range(n):
        p = next((i for i in range(r, m) if a[i][c] != 0), None)
        if p is None:
            continue
        a[r], a[p] = a[p], a[r]
        ar = a[r]
        piv = ar[c]
        for i in range(r + 1, m):
            ai = a[i]
            f = ai[c]
            for j in range(c + 1, n):
                ai[j] = (piv * ai[j] - f * ar[j]) // prev
            ai[c] = 0
        prev = piv
        pivots.append(c)
        r += 1
        if r == m:
            break
    pivot_set = set(pivots)
    basis = []
    for fc in (c for c in range(n) if c not in pivot_set):
        v = [Fraction(0)] * n
        v[fc] = Fraction(1)
        for i in range(len(pivots) - 1, -1, -1):
            pc = pivots[i]
            s = sum(int(a[i][j]) * v[j] for j in range(pc + 1, n) if a[i][j] != 0 and v[j])
            v[pc] = -Fraction(s) / int(a[i][pc])
        basis.append(v)
    return basis
