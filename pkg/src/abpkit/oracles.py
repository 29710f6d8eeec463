"""Reference values of det_m and perm_m, numerically and as polynomials."""

from __future__ import annotations

import itertools
import math

from . import field
from .linalg import det_mod
from .poly import Assignment, MissingVariableError, SparsePoly, VarId

MAX_PERM_M = 24


def scalar_matrix(m: int, a: Assignment) -> list[list[int]]:
    try:
        return [[a[VarId(i, j)] for j in range(1, m + 1)] for i in range(1, m + 1)]
    except KeyError as exc:
        raise MissingVariableError(exc.args[0]) from None


def det_reference(m: int, a: Assignment) -> int:
    if m < 1:
        raise ValueError("m must be at least 1")
    return det_mod(scalar_matrix(m, a))


def perm_reference(m: int, a: Assignment) -> int:
    """Ryser's formula, walking subsets in Gray-code order (O(2^m m))."""
    if not 1 <= m <= MAX_PERM_M:
        raise ValueError(f"perm_reference supports 1 <= m <= {MAX_PERM_M}, got {m}")
    p = field.get_prime()
    x = scalar_matrix(m, a)
    row_sums = [0] * m
    total = 0
    prev_gray = 0
    for k in range(1, 1 << m):
        gray = k ^ (k >> 1)
        j = (gray ^ prev_gray).bit_length() - 1
        sign = 1 if gray & (1 << j) else -1
        for i in range(m):
            row_sums[i] += sign * x[i][j]
        prev_gray = gray
        prod = 1
        for s in row_sums:
            prod = prod * s % p
            if not prod:
                break
        size = bin(gray).count("1")
        total += -prod if (m - size) & 1 else prod
    return total % p


def perm_naive(m: int, a: Assignment) -> int:
    p = field.get_prime()
    x = scalar_matrix(m, a)
    total = 0
    for sigma in itertools.permutations(range(m)):
        total += math.prod(x[i][sigma[i]] for i in range(m))
    return total % p


def permutation_sign(sigma) -> int:
    sign = 1
    seen = [False] * len(sigma)
    for i in range(len(sigma)):
        if seen[i]:
            continue
        j, length = i, 0
        while not seen[j]:
            seen[j] = True
            j = sigma[j]
            length += 1
        if length % 2 == 0:
            sign = -sign
    return sign


def leibniz_polynomial(rows, cols, signed: bool) -> SparsePoly:
    """det (signed) or perm of the submatrix y[rows, cols] as a SparsePoly."""
    rows, cols = list(rows), list(cols)
    if len(rows) != len(cols):
        raise ValueError("submatrix must be square")
    terms = {}
    for sigma in itertools.permutations(range(len(cols))):
        mono = tuple(sorted(VarId(rows[i], cols[sigma[i]]) for i in range(len(rows))))
        terms[mono] = permutation_sign(sigma) if signed else 1
    return SparsePoly(terms)


def det_polynomial(m: int) -> SparsePoly:
    return leibniz_polynomial(range(1, m + 1), range(1, m + 1), signed=True)


def perm_polynomial(m: int) -> SparsePoly:
    return leibniz_polynomial(range(1, m + 1), range(1, m + 1), signed=False)
