"""Coefficient-rank certificates for layer-size lower bounds.

The polynomials computed at the vertices of one layer of a degree-layered ABP
are expanded exactly; the rank of their coefficient matrix (rows = vertices,
columns = monomials in sorted order) is a lower bound for the number of
vertices on that layer.  These are certificates about a given program, not
proofs of minimality over all programs.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass

from .abp import Abp
from .linalg import in_span, sparse_rank
from .oracles import leibniz_polynomial
from .pit import pit_equal, target_evaluator
from .poly import DEFAULT_CAP, SparsePoly, VarId

MAX_CERTIFY_M = 7


class CertificateError(ValueError):
    pass


@dataclass
class LayerRankCertificate:
    layer: int
    vertex_count: int
    coeff_rank: int
    bound: int | None = None
    holds: bool | None = None
    targets_in_span: bool | None = None

    def to_json(self) -> dict:
        return dict(self.__dict__)


def _layer_polys(g: Abp, s: int, cap: int) -> tuple[list, list[SparsePoly]]:
    if not g.is_degree_layered():
        raise ValueError("certificates need a degree-layered ABP")
    layers = g.layer_lists()
    if not 0 <= s < len(layers):
        raise ValueError(f"layer {s} out of range 0..{len(layers) - 1}")
    upto = {v for layer in layers[: s + 1] for v in layer}
    polys = g.vertex_polynomials(cap, upto=upto)
    verts = layers[s]
    return verts, [polys.get(v, SparsePoly()) for v in verts]


def _as_row(poly: SparsePoly) -> dict:
    return dict(poly.items())


def layer_rank(g: Abp, s: int, cap: int = DEFAULT_CAP) -> LayerRankCertificate:
    """Rank of the coefficient matrix of the polynomials on layer s."""
    verts, polys = _layer_polys(g, s, cap)
    return LayerRankCertificate(s, len(verts), sparse_rank(_as_row(q) for q in polys))


def layer_columns(g: Abp) -> list[int]:
    """Matrix column referenced by each edge layer; errors unless each edge
    layer uses variables of exactly one column."""
    layers = g.layer_lists()
    cols = []
    for s in range(1, len(layers)):
        used = {v.col for u in layers[s - 1] for _, f in g.out_adj[u] for v in f.variables()}
        if len(used) != 1:
            raise CertificateError(f"edge layer {s} is not column-wise multilinear (columns {sorted(used)})")
        cols.append(used.pop())
    return cols


def certify_binomial_bound(
    g: Abp,
    target: str,
    m: int,
    trials: int = 20,
    seed: int = 0,
    cap: int = DEFAULT_CAP,
) -> list[LayerRankCertificate]:
    """Per-layer certificates that layer s has at least C(m, s) vertices.

    The program is first checked against the claimed target by PIT.  For
    layer s the target family is every s x s sub-permanent (or minor) on the
    columns consumed by the first s edge layers; each must lie in the span of
    the layer polynomials and they are independent, so the layer rank is at
    least C(m, s).
    """
    if not 1 <= m <= MAX_CERTIFY_M:
        raise ValueError(f"certificates are limited to m <= {MAX_CERTIFY_M}")
    if not g.is_degree_layered():
        raise CertificateError("certificates need a degree-layered ABP")
    verdict = pit_equal(g, target_evaluator(target, m), m, m, trials, seed)
    if not verdict.equal:
        raise CertificateError(f"program does not compute {target}_{m} (PIT witness found)")
    cols = layer_columns(g)
    if len(cols) != m or len(set(cols)) != m:
        raise CertificateError(f"edge layers consume columns {cols}, expected each of 1..{m} once")
    certs = []
    for s in range(m + 1):
        verts, polys = _layer_polys(g, s, cap)
        rows = [_as_row(q) for q in polys]
        rank = sparse_rank(rows)
        span_ok = all(
            in_span(_as_row(leibniz_polynomial(T, cols[:s], signed=(target == "det"))), rows)
            for T in itertools.combinations(range(1, m + 1), s)
        )
        bound = math.comb(m, s)
        certs.append(
            LayerRankCertificate(
                layer=s,
                vertex_count=len(verts),
                coeff_rank=rank,
                bound=bound,
                holds=len(verts) >= rank >= bound and span_ok,
                targets_in_span=span_ok,
            )
        )
    return certs


def certified_total(certs: list[LayerRankCertificate]) -> int:
    """Vertices over layers 0..m-1, i.e. the IMM size the certificates bound."""
    return sum(c.vertex_count for c in certs[:-1])


def certify_nosqueeze(
    g: Abp,
    rows: list[int],
    cols: list[int],
    prefix_layers: int,
    cap: int = DEFAULT_CAP,
) -> LayerRankCertificate:
    """Certificate for a submatrix whose variables occur only in the first
    ``prefix_layers`` edge layers.

    One side of the submatrix must have length L = ``prefix_layers``; the
    other has length R.  The rank is taken over the monomials that pick one
    variable from each of L distinct rows and distinct columns of the
    submatrix, and the bound is C(R, L).
    """
    L = prefix_layers
    if L not in (len(rows), len(cols)):
        raise ValueError("prefix_layers must equal the number of rows or of columns")
    R = len(cols) if L == len(rows) else len(rows)
    sub = {VarId(r, c) for r in rows for c in cols}
    layers = g.layer_lists()
    if not g.is_degree_layered():
        raise ValueError("certificates need a degree-layered ABP")
    offending = sorted(
        {
            s
            for s in range(L + 1, len(layers))
            for u in layers[s - 1]
            for _, f in g.out_adj[u]
            if sub.intersection(f.variables())
        }
    )
    if offending:
        raise CertificateError(f"submatrix variables occur in edge layers {offending} beyond {L}")
    verts, polys = _layer_polys(g, L, cap)

    def admissible(mono) -> bool:
        return (
            len(mono) == L
            and all(v in sub for v in mono)
            and len({v.row for v in mono}) == L
            and len({v.col for v in mono}) == L
        )

    projected = [{mono: c for mono, c in q.items() if admissible(mono)} for q in polys]
    rank = sparse_rank(projected)
    bound = math.comb(R, L)
    return LayerRankCertificate(L, len(verts), rank, bound, len(verts) >= rank >= bound)
