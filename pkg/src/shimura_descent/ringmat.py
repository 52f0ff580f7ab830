"""Tiny exact matrix helpers, generic over a (possibly noncommutative)
division ring whose elements provide +, -, *, .inv() and .is_zero().

Used for the symbolic involution checks on matrices over CM fields and
quaternion algebras; Gaussian elimination only ever multiplies rows on the
left, which is sound over a division ring.
"""

from __future__ import annotations

from .errors import DivisionByZero


def rm_identity(n, one, zero):
    return [[one if i == j else zero for j in range(n)] for i in range(n)]


def rm_mul(a, b):
    n, k, m = len(a), len(b), len(b[0])
    out = []
    for i in range(n):
        row = []
        for j in range(m):
            acc = a[i][0] * b[0][j]
            for t in range(1, k):
                acc = acc + a[i][t] * b[t][j]
            row.append(acc)
        out.append(row)
    return out


def rm_transpose(a):
    return [list(col) for col in zip(*a)]


def rm_map(f, a):
    return [[f(x) for x in row] for row in a]


def rm_eq(a, b) -> bool:
    return all(x == y for ra, rb in zip(a, b) for x, y in zip(ra, rb))


def rm_inv(a, one, zero):
    """Inverse by left-row reduction; raises DivisionByZero if singular."""
    n = len(a)
    m = [list(row) + [one if i == j else zero for j in range(n)]
         for i, row in enumerate(a)]
    for col in range(n):
        piv = None
        for r in range(col, n):
            x = m[r][col]
            if not x.is_zero():
                try:
                    x.inv()
                except DivisionByZero:
                    continue
                piv = r
                break
        if piv is None:
            raise DivisionByZero("matrix is singular over the ring")
        m[col], m[piv] = m[piv], m[col]
        f = m[col][col].inv()
        m[col] = [f * x for x in m[col]]
        for r in range(n):
            if r != col and not m[r][col].is_zero():
                g = m[r][col]
                m[r] = [x - g * y for x, y in zip(m[r], m[col])]
    return [row[n:] for row in m]
