"""Numeric and exact utilities shared by the complex matrix models: BFS
search for Borel-restoring Weyl representatives, real Lie-algebra bases via
nullspaces, root-space support tests, and exact recovery of monomial torus
maps by probing with prime coordinates."""

from __future__ import annotations

from collections import deque
from fractions import Fraction

import numpy as np

from .errors import InternalError

_PRIMES = (2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41, 43, 47, 53, 59, 61)

SUPPORT_TOL = 1e-9


def monomial_exponent_matrix(point_map, rank: int) -> list[list[int]]:
    """Exponent matrix E of a monomial map on (Q*)^rank.

    point_map sends a tuple of Fractions to a tuple of Fractions with
    new_k = +- prod_j old_j^(E[k][j]); E is recovered exactly by factoring
    the image of a prime-coordinate probe.
    """
    primes = _PRIMES[:rank]
    outputs = point_map(tuple(Fraction(p) for p in primes))
    mat = []
    for val in outputs:
        num, den = abs(val.numerator), val.denominator
        row = []
        for p in primes:
            e = 0
            while num % p == 0:
                num //= p
                e += 1
            while den % p == 0:
                den //= p
                e -= 1
            row.append(e)
        if num != 1 or den != 1:
            raise InternalError("torus map is not monomial in the probe basis")
        mat.append(row)
    return mat


def character_action_matrix(point_map, rank: int) -> list[list[int]]:
    """Matrix of chi -> chi o f on the character lattice, from the point map.

    If points transform with exponent matrix E, characters pull back by E^T.
    """
    e = monomial_exponent_matrix(point_map, rank)
    return [list(col) for col in zip(*e)]


def weyl_search_smallest_word(generators, test, n: int, cap: int = 500000):
    """Breadth-first search over the group generated by signed permutation
    matrices, smallest word first; returns the first element passing `test`.
    """
    ident = np.eye(n, dtype=complex)

    def key(m):
        return tuple(np.round(m.real, 6).ravel()) + tuple(np.round(m.imag, 6).ravel())

    if test(ident):
        return ident, []
    seen = {key(ident)}
    queue = deque([(ident, [])])
    while queue:
        mat, word = queue.popleft()
        for gi, g in enumerate(generators):
            nm = g @ mat
            k = key(nm)
            if k in seen:
                continue
            seen.add(k)
            nw = word + [gi + 1]
            if test(nm):
                return nm, nw
            if len(seen) < cap:
                queue.append((nm, nw))
    raise InternalError("Borel-restoring Weyl representative not found")


def support_positions(mat: np.ndarray, tol: float = SUPPORT_TOL) -> set[tuple[int, int]]:
    scale = max(1.0, float(np.max(np.abs(mat))))
    rows, cols = np.nonzero(np.abs(mat) > tol * scale)
    return set(zip(rows.tolist(), cols.tolist()))


def strictly_upper(positions) -> bool:
    return all(i < j for i, j in positions)


def strictly_lower(positions) -> bool:
    return all(i > j for i, j in positions)


def permutation_of_monomial(mat: np.ndarray) -> list[int]:
    """sigma with mat e_{sigma(i)} = +- e_i, for a monomial matrix."""
    n = mat.shape[0]
    out = []
    for i in range(n):
        j = int(np.argmax(np.abs(mat[i, :])))
        out.append(j)
    if sorted(out) != list(range(n)):
        raise InternalError("matrix is not monomial")
    return out


def real_nullspace(constraint_rows: np.ndarray, tol: float = 1e-9) -> np.ndarray:
    """Orthonormal basis (rows) of the real nullspace of a constraint matrix."""
    if constraint_rows.size == 0:
        raise ValueError("empty constraint matrix")
    _, s, vt = np.linalg.svd(constraint_rows)
    scale = s[0] if len(s) and s[0] > 0 else 1.0
    null_mask = np.ones(vt.shape[0], dtype=bool)
    null_mask[: len(s)] = s < tol * scale
    return vt[null_mask]


def hermitian_signature(h: np.ndarray, tol: float = 1e-9) -> tuple[int, int]:
    vals = np.linalg.eigvalsh(h)
    scale = max(np.max(np.abs(vals)), 1e-30)
    pos = int(np.sum(vals > tol * scale))
    neg = int(np.sum(vals < -tol * scale))
    return pos, neg


def sl_weyl_generators(n: int) -> list[np.ndarray]:
    """Simple-reflection representatives in SL_n: the usual 2x2 blocks
    [[0,-1],[1,0]] along the diagonal."""
    gens = []
    for i in range(n - 1):
        g = np.eye(n, dtype=complex)
        g[i, i] = 0
        g[i + 1, i + 1] = 0
        g[i, i + 1] = -1
        g[i + 1, i] = 1
        gens.append(g)
    return gens


def so_weyl_generators(n: int) -> list[np.ndarray]:
    """Simple-reflection representatives in SO(J_2n) (antidiagonal form),
    as permutation matrices: s_i swaps the coordinate pairs (i, i+1) and
    (2n-i, 2n+1-i); s_n swaps (n-1, n+1) and (n, n+2).  1-indexed in the
    usual D_n Bourbaki order, 0-indexed matrices."""
    size = 2 * n
    gens = []

    def perm_matrix(pairs):
        g = np.eye(size, dtype=complex)
        for a, b in pairs:
            g[[a, b]] = g[[b, a]]
        return g

    for i in range(n - 1):
        gens.append(perm_matrix([(i, i + 1), (size - 2 - i, size - 1 - i)]))
    gens.append(perm_matrix([(n - 2, n), (n - 1, n + 1)]))
    return gens


def so_root_space(size: int, a: int, b: int) -> np.ndarray:
    """E_ab - E_{size-1-b, size-1-a}: a root vector of so(J_size)."""
    m = np.zeros((size, size), dtype=complex)
    m[a, b] = 1
    m[size - 1 - b, size - 1 - a] = -1
    return m


def antidiag(n: int) -> np.ndarray:
    return np.fliplr(np.eye(n, dtype=complex))
