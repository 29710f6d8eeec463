"""Exact linear algebra over F_p, with a rational cross-check for ranks."""

from __future__ import annotations

from fractions import Fraction
from typing import Iterable, Mapping, Sequence

from . import field
from .poly import DEFAULT_CAP, AffineForm, CapExceededError, SparsePoly, mul_truncated

Matrix = list[list[int]]


def identity(n: int) -> Matrix:
    return [[int(i == j) for j in range(n)] for i in range(n)]


def det_mod(matrix: Sequence[Sequence[int]]) -> int:
    """Determinant by Gaussian elimination with row pivoting, sign tracked."""
    p = field.get_prime()
    a = [[x % p for x in row] for row in matrix]
    n = len(a)
    det = 1
    for k in range(n):
        piv = next((r for r in range(k, n) if a[r][k]), None)
        if piv is None:
            return 0
        if piv != k:
            a[k], a[piv] = a[piv], a[k]
            det = -det
        pivot_row = a[k]
        det = det * pivot_row[k] % p
        pinv = pow(pivot_row[k], p - 2, p)
        tail = pivot_row[k + 1:]
        for r in range(k + 1, n):
            f = a[r][k]
            if f:
                f = f * pinv % p
                row = a[r]
                row[k + 1:] = [(x - f * y) % p for x, y in zip(row[k + 1:], tail)]
    return det % p


def rank_mod(rows: Iterable[Sequence[int]]) -> int:
    return len(row_echelon(rows)[1])


def row_echelon(rows: Iterable[Sequence[int]]) -> tuple[Matrix, list[int]]:
    """Reduced row echelon form mod p; returns (nonzero rows, pivot columns)."""
    p = field.get_prime()
    a = [[x % p for x in row] for row in rows]
    if not a:
        return [], []
    ncols = len(a[0])
    pivots: list[int] = []
    r = 0
    for c in range(ncols):
        piv = next((i for i in range(r, len(a)) if a[i][c]), None)
        if piv is None:
            continue
        a[r], a[piv] = a[piv], a[r]
        pinv = pow(a[r][c], p - 2, p)
        a[r] = [x * pinv % p for x in a[r]]
        for i in range(len(a)):
            if i != r and a[i][c]:
                f = a[i][c]
                a[i] = [(x - f * y) % p for x, y in zip(a[i], a[r])]
        pivots.append(c)
        r += 1
        if r == len(a):
            break
    return a[:r], pivots


def sparse_rank(rows: Iterable[Mapping[object, int]]) -> int:
    """Rank of rows given as {column: coeff} dicts (columns any sortable keys)."""
    p = field.get_prime()
    basis: dict[object, dict] = {}
    for row in rows:
        r = {c: v % p for c, v in row.items() if v % p}
        r = _reduce_against(r, basis, p)
        if r:
            pc = min(r)
            pinv = pow(r[pc], p - 2, p)
            basis[pc] = {c: v * pinv % p for c, v in r.items()}
    return len(basis)


def _reduce_against(r: dict, basis: dict, p: int) -> dict:
    changed = True
    while changed and r:
        changed = False
        for pc in sorted(r):
            if pc in basis:
                f = r[pc]
                for c, v in basis[pc].items():
                    nv = (r.get(c, 0) - f * v) % p
                    if nv:
                        r[c] = nv
                    else:
                        r.pop(c, None)
                changed = True
                break
    return r


def in_span(vector: Mapping[object, int], rows: Iterable[Mapping[object, int]]) -> bool:
    p = field.get_prime()
    basis: dict[object, dict] = {}
    for row in rows:
        r = _reduce_against({c: v % p for c, v in row.items() if v % p}, basis, p)
        if r:
            pc = min(r)
            pinv = pow(r[pc], p - 2, p)
            basis[pc] = {c: v * pinv % p for c, v in r.items()}
    rest = _reduce_against({c: v % p for c, v in vector.items() if v % p}, basis, p)
    return not rest


def rank_rational(rows: Sequence[Sequence[int]]) -> int:
    """Rank over Q of an integer matrix (entries taken as given, not mod p)."""
    a = [[Fraction(x) for x in row] for row in rows]
    if not a:
        return 0
    rank = 0
    ncols = len(a[0])
    for c in range(ncols):
        piv = next((i for i in range(rank, len(a)) if a[i][c] != 0), None)
        if piv is None:
            continue
        a[rank], a[piv] = a[piv], a[rank]
        for i in range(rank + 1, len(a)):
            if a[i][c] != 0:
                f = a[i][c] / a[rank][c]
                a[i] = [x - f * y for x, y in zip(a[i], a[rank])]
        rank += 1
    return rank


def matmul(a: Sequence[Sequence[int]], b: Sequence[Sequence[int]]) -> Matrix:
    p = field.get_prime()
    bt = list(zip(*b))
    return [[sum(x * y for x, y in zip(row, col)) % p for col in bt] for row in a]


def symbolic_det(
    entries: Mapping[tuple[int, int], AffineForm],
    n: int,
    cap: int = DEFAULT_CAP,
    max_degree: int | None = None,
) -> SparsePoly:
    """Exact determinant of a sparse n x n affine matrix as a SparsePoly.

    Division-free row-by-row expansion with memoisation on the set of used
    columns.  ``max_degree`` drops higher-degree terms (a ring homomorphism,
    so lower-degree parts stay exact).
    """
    rows: list[list[tuple[int, SparsePoly]]] = [[] for _ in range(n)]
    for (r, c), f in entries.items():
        if not f.is_zero():
            rows[r].append((c, SparsePoly.from_affine(f)))
    for row in rows:
        row.sort(key=lambda t: t[0])
    states: dict[int, SparsePoly] = {0: SparsePoly.constant(1)}
    for r in range(n):
        nxt: dict[int, SparsePoly] = {}
        for mask, poly in states.items():
            for c, entry in rows[r]:
                bit = 1 << c
                if mask & bit:
                    continue
                # inversions added: previously used columns to the right of c
                flips = bin(mask >> (c + 1)).count("1")
                term = mul_truncated(poly, entry, max_degree)
                if flips & 1:
                    term = -term
                key = mask | bit
                nxt[key] = nxt[key] + term if key in nxt else term
        states = {k: v for k, v in nxt.items() if not v.is_zero()}
        size = sum(len(v) for v in states.values())
        if size > cap:
            raise CapExceededError(size, cap)
        if not states:
            return SparsePoly()
    return states.get((1 << n) - 1, SparsePoly())
