"""Iterated matrix multiplication: homogeneous product form, trace form,
matrix powering, block multilinearity and Grenet's permanent construction."""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field as dc_field
from typing import Callable, Hashable, Sequence

from . import field
from .abp import Abp, NotLayeredError
from .poly import DEFAULT_CAP, AffineForm, Assignment, CapExceededError, SparsePoly, VarId

Position = tuple[int, int]


@dataclass
class AffineMatrix:
    """Sparse ``rows x cols`` matrix of affine forms."""

    rows: int
    cols: int
    entries: dict[Position, AffineForm] = dc_field(default_factory=dict)

    def __post_init__(self):
        for r, c in self.entries:
            if not (0 <= r < self.rows and 0 <= c < self.cols):
                raise ValueError(f"entry {(r, c)} outside {self.rows}x{self.cols}")
        self.entries = {pos: f for pos, f in sorted(self.entries.items()) if not f.is_zero()}

    @classmethod
    def from_dense(cls, dense: Sequence[Sequence[AffineForm]]) -> AffineMatrix:
        rows = len(dense)
        cols = len(dense[0]) if rows else 0
        return cls(rows, cols, {(r, c): f for r, row in enumerate(dense) for c, f in enumerate(row)})

    def dense(self) -> list[list[AffineForm]]:
        zero = AffineForm()
        out = [[zero] * self.cols for _ in range(self.rows)]
        for (r, c), f in self.entries.items():
            out[r][c] = f
        return out

    def get(self, r: int, c: int) -> AffineForm:
        return self.entries.get((r, c), AffineForm())

    def variables(self) -> set[VarId]:
        return {v for f in self.entries.values() for v in f.variables()}

    def apply(self, vec: Sequence[int], a: Assignment) -> list[int]:
        p = field.get_prime()
        out = [0] * self.rows
        for (r, c), f in self.entries.items():
            if vec[c]:
                out[r] = (out[r] + f.evaluate(a) * vec[c]) % p
        return out

    def apply_poly(self, vec: Sequence[SparsePoly]) -> list[SparsePoly]:
        out = [SparsePoly() for _ in range(self.rows)]
        for (r, c), f in self.entries.items():
            if not vec[c].is_zero():
                out[r] = out[r] + vec[c] * f
        return out

    def evaluated(self, a: Assignment) -> list[list[int]]:
        out = [[0] * self.cols for _ in range(self.rows)]
        for (r, c), f in self.entries.items():
            out[r][c] = f.evaluate(a)
        return out


def _check_cap(vec: Sequence[SparsePoly], cap: int) -> None:
    total = sum(len(x) for x in vec)
    if total > cap:
        raise CapExceededError(total, cap)


class HimmExpr:
    """Homogeneous IMM ``A_m ... A_1``.

    ``mats[s-1]`` is ``A_s`` and maps layer s-1 to layer s: it has shape
    ``n_{s+1} x n_s`` with ``n_1 = n_{m+1} = 1``, so the product is 1 x 1.
    Entries are homogeneous linear forms.  The size is ``n_1 + ... + n_m``.
    """

    def __init__(self, mats: Sequence[AffineMatrix], m: int | None = None, names=None):
        mats = list(mats)
        if not mats:
            raise ValueError("need at least one matrix")
        if mats[0].cols != 1 or mats[-1].rows != 1:
            raise ValueError("A_1 must have one column and A_m one row")
        for s in range(1, len(mats)):
            if mats[s].cols != mats[s - 1].rows:
                raise ValueError(f"shape mismatch between A_{s} and A_{s + 1}")
        for s, mat in enumerate(mats, 1):
            bad = [pos for pos, f in mat.entries.items() if not f.is_linear()]
            if bad:
                raise ValueError(f"A_{s} has entries with a constant part at {bad}")
        self.mats = mats
        self.m = m
        self.names = names  # optional per-layer vertex names

    @property
    def shapes(self) -> list[int]:
        return [mat.cols for mat in self.mats]

    @property
    def size(self) -> int:
        return sum(self.shapes)

    @property
    def degree(self) -> int:
        return len(self.mats)

    def __repr__(self) -> str:
        return f"HimmExpr(shapes={self.shapes}, size={self.size})"

    def __eq__(self, other) -> bool:
        if not isinstance(other, HimmExpr):
            return NotImplemented
        return self.mats == other.mats

    def evaluate(self, a: Assignment) -> int:
        vec = [1]
        for mat in self.mats:
            vec = mat.apply(vec, a)
        return vec[0]

    def layer_polynomials(self, upto: int, cap: int = DEFAULT_CAP) -> list[SparsePoly]:
        vec = [SparsePoly.constant(1)]
        for mat in self.mats[:upto]:
            vec = mat.apply_poly(vec)
            _check_cap(vec, cap)
        return vec

    def polynomial(self, cap: int = DEFAULT_CAP) -> SparsePoly:
        return self.layer_polynomials(len(self.mats), cap)[0]


class ImmExpr:
    """Trace form ``trace(B_k ... B_1)`` with square n x n affine matrices."""

    def __init__(self, mats: Sequence[AffineMatrix]):
        mats = list(mats)
        if not mats:
            raise ValueError("need at least one matrix")
        n = mats[0].rows
        if any(mat.rows != n or mat.cols != n for mat in mats):
            raise ValueError("trace-form matrices must all be n x n")
        self.n = n
        self.mats = mats

    def __repr__(self) -> str:
        return f"ImmExpr(n={self.n}, factors={len(self.mats)})"

    def evaluate(self, a: Assignment) -> int:
        p = field.get_prime()
        total = 0
        for start in range(self.n):
            vec = [0] * self.n
            vec[start] = 1
            for mat in self.mats:
                vec = mat.apply(vec, a)
                if not any(vec):
                    break
            total += vec[start]
        return total % p

    def polynomial(self, cap: int = DEFAULT_CAP) -> SparsePoly:
        total = SparsePoly()
        for start in range(self.n):
            vec = [SparsePoly() for _ in range(self.n)]
            vec[start] = SparsePoly.constant(1)
            for mat in self.mats:
                vec = mat.apply_poly(vec)
                _check_cap(vec, cap)
            total = total + vec[start]
        return total


class MatrixPowerExpr:
    """``trace(A^power)`` for a square affine matrix A."""

    def __init__(self, matrix: AffineMatrix, power: int):
        if matrix.rows != matrix.cols:
            raise ValueError("matrix must be square")
        self.matrix = matrix
        self.power = power

    @property
    def n(self) -> int:
        return self.matrix.rows

    def as_imm(self) -> ImmExpr:
        return ImmExpr([self.matrix] * self.power)

    def evaluate(self, a: Assignment) -> int:
        return self.as_imm().evaluate(a)

    def polynomial(self, cap: int = DEFAULT_CAP) -> SparsePoly:
        return self.as_imm().polynomial(cap)

    def diagonal_walk_polynomials(self, cap: int = DEFAULT_CAP) -> list[SparsePoly]:
        """Diagonal of ``A^power`` symbolically, one polynomial per vertex."""
        out = []
        for start in range(self.n):
            vec = [SparsePoly() for _ in range(self.n)]
            vec[start] = SparsePoly.constant(1)
            for _ in range(self.power):
                vec = self.matrix.apply_poly(vec)
                _check_cap(vec, cap)
            out.append(vec[start])
        return out


# -- conversions -----------------------------------------------------------------


def himm_to_dlabp(h: HimmExpr) -> Abp:
    """Degree-layered ABP with one vertex per row index of each layer plus a sink.

    Vertex ``(s, i)`` is position i of layer s; the size is ``h.size + 1``.
    """
    m = len(h.mats)
    layers = [[(0, 0)]] + [[(s, i) for i in range(mat.rows)] for s, mat in enumerate(h.mats, 1)]
    names = h.names
    rename: Callable = (lambda v: names[v[0]][v[1]]) if names else (lambda v: f"{v[0]}:{v[1]}")
    vertices = [rename(v) for layer in layers for v in layer]
    edges = []
    for s, mat in enumerate(h.mats, 1):
        for (r, c), f in mat.entries.items():
            edges.append((rename((s - 1, c)), rename((s, r)), f))
    return Abp(vertices, edges, rename((0, 0)), rename((m, 0)), h.m)


def dlabp_to_himm(g: Abp) -> HimmExpr:
    """Read ``A_s`` off the labels between layers s-1 and s."""
    if not g.is_degree_layered():
        raise ValueError("dlabp_to_himm needs a degree-layered ABP")
    layers = g.layer_lists()
    pos = [{v: i for i, v in enumerate(layer)} for layer in layers]
    mats = []
    for s in range(1, len(layers)):
        entries = {}
        for u in layers[s - 1]:
            for w, f in g.out_adj[u]:
                entries[(pos[s][w], pos[s - 1][u])] = f
        mats.append(AffineMatrix(len(layers[s]), len(layers[s - 1]), entries))
    return HimmExpr(mats, g.m, names=[list(layer) for layer in layers])


def _root_index(g: Abp) -> tuple[dict, list[list]]:
    layers = g.layer_lists()
    order = [g.source] + [v for layer in layers[1:-1] for v in layer]
    idx = {v: i for i, v in enumerate(order)}
    idx[g.sink] = 0
    return idx, layers


def labp_to_imm(g: Abp) -> ImmExpr:
    """Trace form of a layered ABP with source and sink identified.

    ``B_j`` holds the edges from layer j-1 to layer j at (head, tail).  Only
    closed walks through the root survive the trace, because ``B_1`` has
    nonzero columns only at the root; so the trace equals the ABP output and
    ``n = size - 1``.
    """
    if g.layers() is None:
        raise NotLayeredError("labp_to_imm needs a layered ABP")
    idx, layers = _root_index(g)
    n = g.size - 1
    mats = []
    for j in range(1, len(layers)):
        entries = {}
        for u in layers[j - 1]:
            for w, f in g.out_adj[u]:
                entries[(idx[w], idx[u])] = f
        mats.append(AffineMatrix(n, n, entries))
    return ImmExpr(mats)


def to_matrix_power(g: Abp) -> MatrixPowerExpr:
    """Square matrix A with ``trace(A^k) = P`` for the k edge layers of g.

    A is the adjacency matrix of g with source and sink identified.  Every
    closed walk of length k is a rotation of a source-sink path, and each path
    shows up k times on the diagonal of the plain adjacency power (once per
    vertex it visits).  The edges leaving the root are therefore scaled by
    ``k^-1 mod p`` so that the trace is P itself.
    """
    if not g.is_degree_layered():
        raise ValueError("to_matrix_power needs a degree-layered ABP")
    idx, layers = _root_index(g)
    k = len(layers) - 1
    if k % field.get_prime() == 0:
        raise ValueError("number of edge layers is divisible by the field characteristic")
    scale = field.inv(k)
    n = g.size - 1
    entries = {(idx[w], idx[u]): (f * scale if u == g.source else f) for (u, w), f in g.edges.items()}
    return MatrixPowerExpr(AffineMatrix(n, n, entries), k)


# -- block multilinearity ----------------------------------------------------------


@dataclass
class Grouping:
    """Partition of the variables; ``group_of`` maps a variable to its group id."""

    name: str
    group_of: Callable[[VarId], Hashable]


def column_grouping() -> Grouping:
    return Grouping("column", lambda v: v.col)


def row_grouping() -> Grouping:
    return Grouping("row", lambda v: v.row)


def grouping(name: str) -> Grouping:
    if name == "column":
        return column_grouping()
    if name == "row":
        return row_grouping()
    raise ValueError(f"unknown grouping {name!r}")


@dataclass
class Violation:
    s: int
    entries: list[Position]
    groups: list


@dataclass
class MultilinearReport:
    ok: bool
    violations: list[Violation]
    groups: list  # group referenced by each A_s (None if not exactly one)

    def to_json(self) -> dict:
        return {
            "ok": self.ok,
            "groups": self.groups,
            "violations": [{"s": v.s, "entries": [list(e) for e in v.entries], "groups": v.groups} for v in self.violations],
        }


def check_block_multilinear(h: HimmExpr, grp: Grouping | None = None) -> MultilinearReport:
    grp = grp or column_grouping()
    violations = []
    groups = []
    for s, mat in enumerate(h.mats, 1):
        touched = sorted({grp.group_of(v) for v in mat.variables()})
        if len(touched) == 1:
            groups.append(touched[0])
            continue
        groups.append(None)
        bad = sorted(pos for pos, f in mat.entries.items() if f.variables())
        violations.append(Violation(s, bad, touched))
    return MultilinearReport(not violations, violations, groups)


# -- Grenet ---------------------------------------------------------------------------

MAX_GRENET_M = 20


def grenet_layer(m: int, s: int) -> list[tuple[int, ...]]:
    return list(itertools.combinations(range(1, m + 1), s))


def grenet_perm(m: int) -> HimmExpr:
    """Column-wise multilinear IMM of size ``2^m - 1`` computing perm_m.

    Layer s is indexed by the s-subsets S of rows; ``A_{s+1}`` sends S to
    ``S + {i}`` with label ``y^{i, s+1}``, consuming column s+1.  The vertex
    S of layer s therefore computes the permanent of rows S, columns 1..s.
    """
    if not 1 <= m <= MAX_GRENET_M:
        raise ValueError(f"grenet_perm supports 1 <= m <= {MAX_GRENET_M}, got {m}")
    layers = [grenet_layer(m, s) for s in range(m + 1)]
    mats = []
    for s in range(m):
        nxt = {S: i for i, S in enumerate(layers[s + 1])}
        entries = {}
        for c, S in enumerate(layers[s]):
            for i in range(1, m + 1):
                if i not in S:
                    T = tuple(sorted(S + (i,)))
                    entries[(nxt[T], c)] = AffineForm.var(i, s + 1)
        mats.append(AffineMatrix(len(layers[s + 1]), len(layers[s]), entries))
    names = [["{" + ",".join(map(str, S)) + "}" for S in layer] for layer in layers]
    return HimmExpr(mats, m, names=names)


def grenet_dlabp(m: int) -> Abp:
    return himm_to_dlabp(grenet_perm(m))


def grenet_size(m: int) -> int:
    return sum(math.comb(m, s) for s in range(m))
