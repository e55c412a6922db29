"""Exact linear algebra over F_p on lists of integer rows.

Matrices are sequences of rows; entries are ints (reduced on entry).
Elimination always pivots on the first nonzero entry in column order, so
every routine is deterministic.
"""

from __future__ import annotations

from typing import Sequence

Row = tuple[int, ...]


def rref(rows: Sequence[Sequence[int]], p: int) -> tuple[list[list[int]], list[int]]:
    """Reduced row echelon form. Returns (nonzero rows, pivot columns)."""
    m = [[x % p for x in r] for r in rows]
    if not m:
        return [], []
    ncols = len(m[0])
    pivots: list[int] = []
    r = 0
    for c in range(ncols):
        if r == len(m):
            break
        piv = next((i for i in range(r, len(m)) if m[i][c]), None)
        if piv is None:
            continue
        m[r], m[piv] = m[piv], m[r]
        inv = pow(m[r][c], -1, p)
        if inv != 1:
            m[r] = [x * inv % p for x in m[r]]
        pr = m[r]
        for i in range(len(m)):
            if i != r and m[i][c]:
                f = m[i][c]
                m[i] = [(a - f * b) % p for a, b in zip(m[i], pr)]
        pivots.append(c)
        r += 1
    return m[:r], pivots


def rank(rows: Sequence[Sequence[int]], p: int) -> int:
    """Rank by forward elimination only (cheaper than a full rref)."""
    m = [[x % p for x in r] for r in rows]
    if not m:
        return 0
    ncols = len(m[0])
    r = 0
    for c in range(ncols):
        if r == len(m):
            break
        piv = next((i for i in range(r, len(m)) if m[i][c]), None)
        if piv is None:
            continue
        m[r], m[piv] = m[piv], m[r]
        inv = pow(m[r][c], -1, p)
        pr = m[r]
        for i in range(r + 1, len(m)):
            if m[i][c]:
                f = m[i][c] * inv % p
                m[i] = [(a - f * b) % p for a, b in zip(m[i], pr)]
        r += 1
    return r


def nullspace(rows: Sequence[Sequence[int]], ncols: int, p: int) -> list[Row]:
    """Basis of {x : A x = 0}, one vector per free column in increasing order.

    Each basis vector has a 1 in its free column and zeros in the other
    free columns, so the basis is itself in a canonical form.
    """
    red, pivots = rref(rows, p) if rows else ([], [])
    free = [c for c in range(ncols) if c not in pivots]
    basis = []
    for f in free:
        v = [0] * ncols
        v[f] = 1
        for row, pc in zip(red, pivots):
            v[pc] = -row[f] % p
        basis.append(tuple(v))
    return basis


def span_intersection(a: Sequence[Sequence[int]], b: Sequence[Sequence[int]], p: int) -> list[list[int]]:
    """Reduced basis of span(a) ∩ span(b); ``a`` and ``b`` need not be independent."""
    a = rref(a, p)[0]
    b = rref(b, p)[0]
    if not a or not b:
        return []
    n = len(a[0])
    # solve sum x_i a_i - sum y_j b_j = 0
    cols = [list(r) for r in a] + [[-x % p for x in r] for r in b]
    system = [[cols[k][i] for k in range(len(cols))] for i in range(n)]
    vecs = []
    for sol in nullspace(system, len(cols), p):
        v = [0] * n
        for coef, r in zip(sol[: len(a)], a):
            if coef:
                v = [(x + coef * y) % p for x, y in zip(v, r)]
        vecs.append(v)
    return rref(vecs, p)[0]


def dot(u: Sequence[int], v: Sequence[int], p: int) -> int:
    return sum(x * y for x, y in zip(u, v)) % p


def det(m: Sequence[Sequence[int]], p: int) -> int:
    a = [[x % p for x in r] for r in m]
    n = len(a)
    d = 1
    for c in range(n):
        piv = next((i for i in range(c, n) if a[i][c]), None)
        if piv is None:
            return 0
        if piv != c:
            a[c], a[piv] = a[piv], a[c]
            d = -d
        d = d * a[c][c] % p
        inv = pow(a[c][c], -1, p)
        for i in range(c + 1, n):
            if a[i][c]:
                f = a[i][c] * inv % p
                a[i] = [(x - f * y) % p for x, y in zip(a[i], a[c])]
    return d % p


def combine(coeffs: Sequence[int], basis: Sequence[Sequence[int]], p: int) -> list[int]:
    """Linear combination ``sum coeffs[i] * basis[i]`` reduced mod p."""
    n = len(basis[0])
    out = [0] * n
    for c, row in zip(coeffs, basis):
        if c:
            for i in range(n):
                out[i] += c * row[i]
    return [x % p for x in out]
