"""Determinantal expressions ``det(Lambda + sum_v y_v X^v)``.

Matrices are stored sparsely as ``{(row, col): AffineForm}`` with 0-based
positions.  Public operations that name matrix positions (group operations,
monomial witnesses) use 1-based indices so that the first row/column is 1.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import Iterable, Mapping, NamedTuple, Sequence

from . import field
from .abp import Abp, NotLayeredError
from .linalg import det_mod, identity, rank_mod, rank_rational, sparse_rank, symbolic_det
from .pit import trial_rng
from .poly import DEFAULT_CAP, AffineForm, Assignment, SparsePoly, VarId, affine_product

Position = tuple[int, int]

TARGETS = ("det", "perm", "generic")


class NotRegularError(ValueError):
    pass


class NotStandardError(ValueError):
    pass


class MonomialAbsentError(ValueError):
    pass


class DetExpr:
    """Size-n determinantal expression for a polynomial in matrix variables."""

    def __init__(
        self,
        n: int,
        entries: Mapping[Position, AffineForm],
        target: str = "generic",
        m: int | None = None,
    ):
        if target not in TARGETS:
            raise ValueError(f"target must be one of {TARGETS}")
        self.n = n
        for r, c in entries:
            if not (0 <= r < n and 0 <= c < n):
                raise ValueError(f"entry {(r, c)} outside {n}x{n}")
        self.entries: dict[Position, AffineForm] = {
            pos: f for pos, f in sorted(entries.items()) if not f.is_zero()
        }
        self.target = target
        self.m = m

    @classmethod
    def from_matrix(cls, matrix: Sequence[Sequence[AffineForm]], target="generic", m=None) -> DetExpr:
        n = len(matrix)
        return cls(n, {(r, c): f for r, row in enumerate(matrix) for c, f in enumerate(row)}, target, m)

    @classmethod
    def from_parts(
        cls,
        lam: Sequence[Sequence[int]],
        coeff_mats: Mapping[VarId, Sequence[Sequence[int]]],
        target="generic",
        m=None,
    ) -> DetExpr:
        n = len(lam)
        consts = {(r, c): x for r, row in enumerate(lam) for c, x in enumerate(row) if x}
        terms: dict[Position, list] = {}
        for v, mat in coeff_mats.items():
            for r, row in enumerate(mat):
                for c, x in enumerate(row):
                    if x:
                        terms.setdefault((r, c), []).append((VarId(*v), x))
        positions = set(consts) | set(terms)
        return cls(n, {pos: AffineForm(consts.get(pos, 0), terms.get(pos, ())) for pos in positions}, target, m)

    def with_entries(self, entries: Mapping[Position, AffineForm]) -> DetExpr:
        return DetExpr(self.n, entries, self.target, self.m)

    def __repr__(self) -> str:
        return f"DetExpr(n={self.n}, target={self.target!r}, m={self.m}, nonzeros={len(self.entries)})"

    def __eq__(self, other) -> bool:
        if not isinstance(other, DetExpr):
            return NotImplemented
        return (self.n, self.entries, self.target, self.m) == (other.n, other.entries, other.target, other.m)

    def entry(self, r: int, c: int) -> AffineForm:
        """Entry at 1-based position (r, c)."""
        return self.entries.get((r - 1, c - 1), AffineForm())

    def matrix(self) -> list[list[AffineForm]]:
        zero = AffineForm()
        out = [[zero] * self.n for _ in range(self.n)]
        for (r, c), f in self.entries.items():
            out[r][c] = f
        return out

    @property
    def lam(self) -> list[list[int]]:
        out = [[0] * self.n for _ in range(self.n)]
        for (r, c), f in self.entries.items():
            out[r][c] = f.const
        return out

    @property
    def coeff_mats(self) -> dict[VarId, dict[Position, int]]:
        """Sparse ``X^v`` for every variable that occurs."""
        out: dict[VarId, dict[Position, int]] = {}
        for pos, f in self.entries.items():
            for v, c in f.items():
                out.setdefault(v, {})[pos] = c
        return dict(sorted(out.items()))

    def coeff_matrix(self, v: VarId) -> list[list[int]]:
        out = [[0] * self.n for _ in range(self.n)]
        for (r, c), x in self.coeff_mats.get(v, {}).items():
            out[r][c] = x
        return out

    def variables(self) -> list[VarId]:
        return list(self.coeff_mats)

    def evaluate(self, a: Assignment) -> int:
        mat = [[0] * self.n for _ in range(self.n)]
        for (r, c), f in self.entries.items():
            mat[r][c] = f.evaluate(a)
        return det_mod(mat)

    def polynomial(self, cap: int = DEFAULT_CAP, max_degree: int | None = None) -> SparsePoly:
        return symbolic_det(self.entries, self.n, cap, max_degree)

    def is_regular(self) -> bool:
        return rank_mod(self.lam) == self.n - 1

    def is_standard(self) -> bool:
        return self.lam == standard_lambda(self.n)


def standard_lambda(n: int) -> list[list[int]]:
    lam = identity(n)
    lam[0][0] = 0
    return lam


# -- construction from ABPs -------------------------------------------------


def abp_order(g: Abp) -> list:
    """Root first, then the inner vertices layer by layer in vertex-list order."""
    layers = g.layer_lists()
    return [g.source] + [v for layer in layers[1:-1] for v in layer]


def abp_to_detexpr(g: Abp, target: str = "generic", m: int | None = None) -> tuple[DetExpr, int]:
    """Adjacency matrix of g with source and sink merged and unit loops added.

    Entry (w, v) holds the label of the edge v -> w, so the constant part is
    lower triangular apart from the first row.  Returns ``(expr, sign)`` with
    ``sign * det(expr) == value(g)``: the only cycle covers are one
    source-sink path closed at the root plus loops, and a cycle of length L
    has permutation sign ``(-1)^(L-1)``, so ``sign = +1`` iff the common path
    length is odd.
    """
    if g.layers() is None:
        raise NotLayeredError("abp_to_detexpr needs a layered ABP")
    if g.is_zero_program():
        raise ValueError("zero program has no source-sink path")
    order = abp_order(g)
    idx = {v: i for i, v in enumerate(order)}
    idx[g.sink] = 0
    n = len(order)
    entries: dict[Position, AffineForm] = {(i, i): AffineForm(1) for i in range(1, n)}
    for (u, v), f in g.edges.items():
        entries[(idx[v], idx[u])] = f
    length = g.layers()[g.sink]
    sign = 1 if length % 2 else -1
    return DetExpr(n, entries, target, m if m is not None else g.m), sign


# -- profile ------------------------------------------------------------------


@dataclass
class ExprProfile:
    n: int
    is_regular: bool
    is_standard: bool
    rank_per_var: dict[VarId, int]
    read_per_var: dict[VarId, int]
    max_rank: int
    max_read: int
    rank_per_var_rational: dict[VarId, int] | None = None

    def to_json(self) -> dict:
        out = {
            "n": self.n,
            "is_regular": self.is_regular,
            "is_standard": self.is_standard,
            "max_rank": self.max_rank,
            "max_read": self.max_read,
            "per_var": [
                {"row": v.row, "col": v.col, "rank": self.rank_per_var[v], "read": self.read_per_var[v]}
                for v in self.rank_per_var
            ],
        }
        if self.rank_per_var_rational is not None:
            out["rational_ranks_agree"] = self.rank_per_var_rational == self.rank_per_var
        return out


def _rows(sparse: Mapping[Position, int]) -> list[dict]:
    rows: dict[int, dict] = {}
    for (r, c), x in sparse.items():
        rows.setdefault(r, {})[c] = x
    return list(rows.values())


def profile(e: DetExpr, rational: bool = False) -> ExprProfile:
    """Rank and read counts of every coefficient matrix (ranks over F_p).

    With ``rational=True`` the ranks are recomputed over Q, reading entries
    as their signed representatives.
    """
    mats = e.coeff_mats
    ranks = {v: sparse_rank(_rows(mat)) for v, mat in mats.items()}
    reads = {v: len(mat) for v, mat in mats.items()}
    rat = None
    if rational:
        rat = {}
        for v, mat in mats.items():
            rows = _rows({pos: field.signed(x) for pos, x in mat.items()})
            cols = sorted({c for row in rows for c in row})
            rat[v] = rank_rational([[row.get(c, 0) for c in cols] for row in rows])
    return ExprProfile(
        n=e.n,
        is_regular=e.is_regular(),
        is_standard=e.is_standard(),
        rank_per_var=ranks,
        read_per_var=reads,
        max_rank=max(ranks.values(), default=0),
        max_read=max(reads.values(), default=0),
        rank_per_var_rational=rat,
    )


# -- row/column bookkeeping ------------------------------------------------------


class _Work:
    """Dense affine matrix with the row and column transforms applied so far,
    maintaining ``A = P @ A0 @ Q``."""

    def __init__(self, e: DetExpr):
        self.n = e.n
        self.a = e.matrix()
        self.lam = e.lam
        self.P = identity(e.n)
        self.Q = identity(e.n)
        self.p = field.get_prime()

    def swap_rows(self, i, j):
        for mat in (self.a, self.lam, self.P):
            mat[i], mat[j] = mat[j], mat[i]

    def swap_cols(self, i, j):
        for mat in (self.a, self.lam, self.Q):
            for row in mat:
                row[i], row[j] = row[j], row[i]

    def add_row(self, src, dst, alpha):
        """row[dst] += alpha * row[src]"""
        p = self.p
        self.a[dst] = [x + y * alpha for x, y in zip(self.a[dst], self.a[src])]
        for mat in (self.lam, self.P):
            mat[dst] = [(x + y * alpha) % p for x, y in zip(mat[dst], mat[src])]

    def add_col(self, src, dst, alpha):
        """col[dst] += alpha * col[src]"""
        p = self.p
        for row in self.a:
            row[dst] = row[dst] + row[src] * alpha
        for mat in (self.lam, self.Q):
            for row in mat:
                row[dst] = (row[dst] + row[src] * alpha) % p

    def scale_row(self, i, alpha):
        p = self.p
        self.a[i] = [x * alpha for x in self.a[i]]
        for mat in (self.lam, self.P):
            mat[i] = [x * alpha % p for x in mat[i]]

    def expr(self, like: DetExpr) -> DetExpr:
        return DetExpr.from_matrix(self.a, like.target, like.m)


class Standardized(NamedTuple):
    """``expr`` equals ``P @ A @ Q`` for the input A, ``det(expr) = factor * det(A)``."""

    expr: DetExpr
    factor: int
    row_transform: list
    col_transform: list


def standardize(e: DetExpr, fold: bool = False) -> Standardized:
    """Bring Lambda to ``diag(0, 1, ..., 1)`` by invertible row/column operations.

    With ``fold=True`` the first row is rescaled so the determinant is
    preserved exactly and ``factor`` is 1.  Λ's first row is zero afterwards,
    so the rescaling keeps it standard.
    """
    n = e.n
    if not e.is_regular():
        raise NotRegularError("standardize needs rank(Lambda) = n - 1")
    if e.is_standard():
        return Standardized(e, 1, identity(n), identity(n))
    w = _Work(e)
    p = w.p
    for k in range(n - 1):
        lam = w.lam
        if lam[k][k]:
            r, c = k, k
        else:
            diag = next((j for j in range(k + 1, n) if lam[j][j]), None)
            if diag is not None:
                r, c = diag, diag
            else:
                r, c = next((i, j) for i in range(k, n) for j in range(k, n) if lam[i][j])
        if r != k:
            w.swap_rows(k, r)
        if c != k:
            w.swap_cols(k, c)
        piv = w.lam[k][k]
        if piv != 1:
            w.scale_row(k, pow(piv, p - 2, p))
        for i in range(n):
            if i != k and w.lam[i][k]:
                w.add_row(k, i, -w.lam[i][k])
        for j in range(n):
            if j != k and w.lam[k][j]:
                w.add_col(k, j, -w.lam[k][j])
    # Lambda is now diag(1, ..., 1, 0); move the zero to the front
    w.swap_rows(0, n - 1)
    w.swap_cols(0, n - 1)
    factor = det_mod(w.P) * det_mod(w.Q) % p
    if fold and factor != 1:
        w.scale_row(0, pow(factor, p - 2, p))
        factor = 1
    out = w.expr(e)
    assert out.is_standard()
    return Standardized(out, factor, w.P, w.Q)


# -- group operations preserving det and a standard Lambda ------------------------


@dataclass(frozen=True)
class FirstColumnOp:
    """Add ``alpha`` times column 1 to column ``j``."""

    alpha: int
    j: int


@dataclass(frozen=True)
class FirstRowOp:
    """Add ``alpha`` times row 1 to row ``j``."""

    alpha: int
    j: int


@dataclass(frozen=True)
class PermutationConjugation:
    i: int
    j: int


@dataclass(frozen=True)
class EliminationConjugation:
    """Add ``alpha`` times row i to row j, then subtract ``alpha`` times column j from column i."""

    alpha: int
    i: int
    j: int


GroupOp = FirstColumnOp | FirstRowOp | PermutationConjugation | EliminationConjugation


def _check_index(n: int, *idx: int) -> None:
    for i in idx:
        if not 2 <= i <= n:
            raise IndexError(f"index {i} outside 2..{n}")


def apply_group_op(e: DetExpr, op: GroupOp) -> DetExpr:
    w = _Work(e)
    if isinstance(op, FirstColumnOp):
        _check_index(e.n, op.j)
        w.add_col(0, op.j - 1, op.alpha)
    elif isinstance(op, FirstRowOp):
        _check_index(e.n, op.j)
        w.add_row(0, op.j - 1, op.alpha)
    elif isinstance(op, PermutationConjugation):
        _check_index(e.n, op.i, op.j)
        if op.i == op.j:
            raise ValueError("permutation conjugation needs i != j")
        w.swap_rows(op.i - 1, op.j - 1)
        w.swap_cols(op.i - 1, op.j - 1)
    elif isinstance(op, EliminationConjugation):
        _check_index(e.n, op.i, op.j)
        if op.i == op.j:
            raise ValueError("elimination conjugation needs i != j")
        w.add_row(op.i - 1, op.j - 1, op.alpha)
        w.add_col(op.j - 1, op.i - 1, -op.alpha)
    else:
        raise TypeError(f"unknown group operation {op!r}")
    return w.expr(e)


# -- structural lemma checks --------------------------------------------------------


def _projective_key(f: AffineForm):
    lead = f.const if f.const else f.items()[0][1]
    return f * field.inv(lead)


@dataclass
class LemmaReport:
    prop_I: bool
    prop_II: bool
    prop_III_col: int
    prop_III_row: int
    prop_III_col_up_to_scalar: int
    prop_III_row_up_to_scalar: int

    def holds(self, m: int) -> bool:
        return self.prop_I and self.prop_II and self.prop_III_col >= m and self.prop_III_row >= m

    def to_json(self) -> dict:
        return dict(self.__dict__)


def check_lemma_properties(e: DetExpr) -> LemmaReport:
    """(I) A_11 = 0; (II) sum_{j>=2} A_1j A_j1 vanishes identically; (III) number
    of distinct nonzero entries in the first column and first row."""
    if not e.is_standard():
        raise NotStandardError("expression is not standard; run standardize first")
    ent = e.entries
    prop_i = (0, 0) not in ent
    acc = SparsePoly()
    for j in range(1, e.n):
        if (0, j) in ent and (j, 0) in ent:
            acc = acc + affine_product(ent[(0, j)], ent[(j, 0)])
    col = {ent[(i, 0)] for i in range(e.n) if (i, 0) in ent}
    row = {ent[(0, j)] for j in range(e.n) if (0, j) in ent}
    return LemmaReport(
        prop_I=prop_i,
        prop_II=acc.is_zero(),
        prop_III_col=len(col),
        prop_III_row=len(row),
        prop_III_col_up_to_scalar=len({_projective_key(f) for f in col}),
        prop_III_row_up_to_scalar=len({_projective_key(f) for f in row}),
    )


class Witness(NamedTuple):
    """``pi`` is a permutation of (1, 2, 3); k, l are 1-based matrix indices."""

    pi: tuple[int, int, int]
    k: int
    l: int


def restrict_to_variables(e: DetExpr, keep: Iterable[VarId]) -> DetExpr:
    keep = set(keep)
    return e.with_entries(
        {pos: AffineForm(f.const, [(v, c) for v, c in f.items() if v in keep]) for pos, f in e.entries.items()}
    )


def find_monomial_witness(e: DetExpr, mono: Sequence[VarId]) -> Witness | None:
    """First (pi, k, l) in lexicographic order with X^{pi1}_{k,1}, X^{pi2}_{1,l},
    X^{pi3}_{l,k} all nonzero, for a degree-3 monomial of det(A)."""
    mono = [VarId(*v) for v in mono]
    if len(mono) != 3:
        raise ValueError("monomial must have exactly three variables")
    if not e.is_standard():
        raise NotStandardError("expression is not standard; run standardize first")
    sub = restrict_to_variables(e, mono)
    if not sub.polynomial(max_degree=3).coefficient(mono):
        raise MonomialAbsentError("monomial not in polynomial")
    mats = e.coeff_mats
    nz = [mats.get(v, {}) for v in mono]
    for pi in itertools.permutations(range(3)):
        a, b, c = (nz[i] for i in pi)
        for k in range(1, e.n):
            if (k, 0) not in a:
                continue
            for l in range(1, e.n):
                if l != k and (0, l) in b and (l, k) in c:
                    return Witness(tuple(i + 1 for i in pi), k + 1, l + 1)
    return None


# -- restriction m -> m-1 -----------------------------------------------------------

RESTRICT_ATTEMPTS = 16


def restrict(e: DetExpr, seed: int = 0) -> DetExpr:
    """Expression for P_{m-1} from a regular expression for P_m.

    Zeroes the last row and column of variables, fixes ``y^{m,m}`` to a
    random nonzero ``y0`` keeping rank(Lambda) = n - 1, and divides the
    first row by ``y0``.
    """
    if e.m is None or e.m < 2:
        raise ValueError("restrict needs an expression in m x m variables with m >= 2")
    if not e.is_regular():
        raise NotRegularError("restrict needs a regular expression")
    m, n = e.m, e.n
    p = field.get_prime()
    last = VarId(m, m)
    xmm = e.coeff_mats.get(last, {})
    for attempt in range(RESTRICT_ATTEMPTS):
        y0 = int(trial_rng(seed, attempt).integers(1, 2**62)) % p
        if not y0:
            continue
        lam = e.lam
        for (r, c), x in xmm.items():
            lam[r][c] = (lam[r][c] + y0 * x) % p
        if rank_mod(lam) == n - 1:
            break
    else:
        raise RuntimeError(f"no admissible value for {last} in {RESTRICT_ATTEMPTS} draws")
    scale = field.inv(y0)
    entries = {}
    for (r, c), f in e.entries.items():
        g = AffineForm(
            f.const + y0 * f.coeff(last),
            [(v, x) for v, x in f.items() if v.row < m and v.col < m],
        )
        entries[(r, c)] = g * scale if r == 0 else g
    return DetExpr(n, entries, e.target, m - 1)


# -- text emission ---------------------------------------------------------------


def _token(f: AffineForm, wide: bool) -> str:
    if f.is_zero():
        return "0"
    c = field.signed(f.const)
    if f.is_constant() and c in (1, -1):
        return str(c)
    if c == 0 and len(f.items()) == 1:
        v, k = f.items()[0]
        k = field.signed(k)
        if k in (1, -1):
            name = f"x{v.row}_{v.col}" if wide else f"x{v.row}{v.col}"
            return name if k == 1 else "-" + name
    raise ValueError(f"entry {f!r} has no text token; use the JSON emitter")


def emit_text(matrix: DetExpr | Sequence[Sequence[AffineForm]], m: int | None = None) -> str:
    """Right-aligned token grid, one matrix row per line.

    Tokens are ``0``, ``1``, ``-1``, ``x{u}{v}`` and ``-x{u}{v}``; for m >= 10
    the variable tokens become ``x{u}_{v}``.
    """
    if isinstance(matrix, DetExpr):
        m = matrix.m if m is None else m
        matrix = matrix.matrix()
    if m is None:
        m = max((max(v) for row in matrix for f in row for v in f.variables()), default=0)
    wide = m >= 10
    tokens = [[_token(f, wide) for f in row] for row in matrix]
    width = max([4] + [len(t) for row in tokens for t in row])
    return "".join(" ".join(t.rjust(width) for t in row) + "\n" for row in tokens)
