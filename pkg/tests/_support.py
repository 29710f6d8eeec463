"""Independent brute-force oracles and fixtures shared by the tests."""

import itertools
import random

from abpkit import field
from abpkit.detexpr import DetExpr
from abpkit.linalg import det_mod
from abpkit.poly import AffineForm, SparsePoly, VarId


def laplace_det(mat):
    """Cofactor expansion along the first row, exact integers."""
    n = len(mat)
    if n == 1:
        return mat[0][0]
    total = 0
    for j in range(n):
        minor = [row[:j] + row[j + 1 :] for row in mat[1:]]
        total += (-1) ** j * mat[0][j] * laplace_det(minor)
    return total


def leibniz(m, signed, rows=None, cols=None):
    """Sum over bijections rows -> cols of the variable products."""
    rows = list(rows or range(1, m + 1))
    cols = list(cols or range(1, m + 1))
    terms = {}
    for perm in itertools.permutations(range(len(cols))):
        inv = sum(1 for i in range(len(perm)) for j in range(i + 1, len(perm)) if perm[i] > perm[j])
        sign = (-1) ** inv if signed else 1
        terms[tuple(VarId(r, cols[perm[i]]) for i, r in enumerate(rows))] = sign
    return SparsePoly(terms)


def path_sum(g, a):
    """Explicit enumeration of every source-sink path."""
    p = field.get_prime()
    total = 0
    stack = [(g.source, 1)]
    while stack:
        v, w = stack.pop()
        if v == g.sink:
            total += w
            continue
        for u, f in g.out_adj[v]:
            stack.append((u, w * f.evaluate(a) % p))
    return total % p


def assignment_from(mat):
    return {VarId(i + 1, j + 1): x for i, row in enumerate(mat) for j, x in enumerate(row)}


def scramble(e, seed, steps=6):
    """P A Q for products P, Q of random elementary operations; returns
    (expr, det(P) det(Q)) so the caller can undo the scalar."""
    rng = random.Random(seed)
    n = e.n

    def random_invertible():
        mat = [[int(i == j) for j in range(n)] for i in range(n)]
        for _ in range(steps):
            i, j = rng.sample(range(n), 2)
            kind = rng.randrange(3)
            if kind == 0:
                mat[i], mat[j] = mat[j], mat[i]
            elif kind == 1:
                mat[j] = [x + 2 * y for x, y in zip(mat[j], mat[i])]
            else:
                mat[i] = [3 * x for x in mat[i]]
        return mat

    pm, qm = random_invertible(), random_invertible()
    a = e.matrix()
    pa = [[_dot([(pm[i][k], a[k][j]) for k in range(n)]) for j in range(n)] for i in range(n)]
    paq = [[_dot([(qm[k][j], pa[i][k]) for k in range(n)]) for j in range(n)] for i in range(n)]
    return DetExpr.from_matrix(paq, e.target, e.m), det_mod(pm) * det_mod(qm) % field.get_prime()


def _dot(pairs):
    acc = AffineForm()
    for c, f in pairs:
        if c and not f.is_zero():
            acc = acc + f * c
    return acc
