"""Mahajan-Vinay layered ABP for det_m.

Vertices are triples ``(h, u, i)`` with ``i`` the layer.  Within a layer the
vertices are ordered by ``(h, u)``; this order reproduces the published
adjacency matrices for m = 3, 4, 5 exactly.  The variable ``x^u_v`` of the
construction is ``VarId(row=u, col=v)``.
"""

from __future__ import annotations

from .abp import Abp
from .poly import AffineForm


def mv_size(m: int) -> int:
    if m < 1:
        raise ValueError("m must be at least 1")
    return (m**3 - m) // 3 + 2


def mv_layer_count(m: int, i: int) -> int:
    """Vertices in layer i: 1 at both ends, ``i(i+1)/2 + i(m-i)`` inside."""
    if i in (0, m):
        return 1
    if not 0 < i < m:
        raise ValueError(f"layer {i} out of range for m={m}")
    return i * (i + 1) // 2 + i * (m - i)


def mv_layer(m: int, i: int) -> list[tuple[int, int, int]]:
    if i == 0:
        return [(1, 1, 0)]
    if i == m:
        return [(1, 1, m)]
    verts = {(i + 1, i + 1, i)}
    for u in range(2, m + 1):
        for h in range(1, min(i, u) + 1):
            verts.add((h, u, i))
    return sorted(verts)


def mv_vertices(m: int) -> list[tuple[int, int, int]]:
    return [v for i in range(m + 1) for v in mv_layer(m, i)]


def build_mv_abp(m: int) -> Abp:
    """Layered ABP of size ``m^3/3 - m/3 + 2`` computing det_m."""
    if m < 1:
        raise ValueError("m must be at least 1")
    vertices = mv_vertices(m)
    present = set(vertices)
    sink = (1, 1, m)
    alpha = 1 if m % 2 else -1
    edges = []
    for h, u, i in vertices:
        if i == m:
            continue
        if i + 1 == m:
            edges.append(((h, u, i), sink, AffineForm.var(u, h, alpha)))
            continue
        for v in range(h + 1, m + 1):
            if (h, v, i + 1) in present:
                edges.append(((h, u, i), (h, v, i + 1), AffineForm.var(u, v)))
        for hp in range(h + 1, m + 1):
            if (hp, hp, i + 1) in present:
                edges.append(((h, u, i), (hp, hp, i + 1), AffineForm.var(u, h, -1)))
    return Abp(vertices, edges, (1, 1, 0), sink, m)
