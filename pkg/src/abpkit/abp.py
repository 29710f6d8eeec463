"""Algebraic branching programs: representation, analysis and homogenization."""

from __future__ import annotations

import heapq
import warnings
from dataclasses import dataclass, field as dc_field
from typing import Hashable, Iterable

from . import field
from .poly import DEFAULT_CAP, AffineForm, Assignment, CapExceededError, SparsePoly, VarId

Vertex = Hashable


class AbpValidationError(ValueError):
    """Structural problem; ``problems`` lists ``(kind, [vertices])`` pairs."""

    def __init__(self, problems: list[tuple[str, list]]):
        self.problems = problems
        msg = "; ".join(f"{kind}: {', '.join(map(str, vs))}" for kind, vs in problems)
        super().__init__(f"invalid ABP ({msg})")


class NotLayeredError(ValueError):
    pass


@dataclass
class AbpReport:
    size: int
    is_layered: bool
    is_homogeneous: bool
    is_degree_layered: bool
    layer_profile: list[int]
    degree: int
    is_zero: bool = False
    notes: list[str] = dc_field(default_factory=list)

    def to_json(self) -> dict:
        return {
            "size": self.size,
            "is_layered": self.is_layered,
            "is_homogeneous": self.is_homogeneous,
            "is_degree_layered": self.is_degree_layered,
            "layer_profile": self.layer_profile,
            "degree": self.degree,
            "is_zero": self.is_zero,
            "notes": self.notes,
        }


class Abp:
    """A DAG with one source and one sink whose edges carry affine forms.

    Parallel edges are merged by adding their labels and zero labels are
    dropped, so ``edges`` maps ``(u, v)`` to a single nonzero label.  The
    vertex list order is kept and used to break ties in every traversal.
    ``m`` records the matrix dimension of the variable universe, if any.
    """

    def __init__(
        self,
        vertices: Iterable[Vertex],
        edges: Iterable[tuple[Vertex, Vertex, AffineForm]],
        source: Vertex | None = None,
        sink: Vertex | None = None,
        m: int | None = None,
    ):
        self.vertices: tuple = tuple(vertices)
        self.index = {v: i for i, v in enumerate(self.vertices)}
        if len(self.index) != len(self.vertices):
            raise ValueError("duplicate vertex names")
        merged: dict[tuple, AffineForm] = {}
        for u, v, label in edges:
            if u not in self.index or v not in self.index:
                raise AbpValidationError([("unknown vertex", [x for x in (u, v) if x not in self.index])])
            merged[(u, v)] = merged[(u, v)] + label if (u, v) in merged else label
        self.edges: dict[tuple, AffineForm] = {k: f for k, f in merged.items() if not f.is_zero()}
        self.out_adj: dict[Vertex, list] = {v: [] for v in self.vertices}
        self.in_adj: dict[Vertex, list] = {v: [] for v in self.vertices}
        for (u, v), f in self.edges.items():
            self.out_adj[u].append((v, f))
            self.in_adj[v].append((u, f))
        if source is None:
            cands = [v for v in self.vertices if not self.in_adj[v]]
            source = cands[0] if len(cands) == 1 else None
        if sink is None:
            cands = [v for v in self.vertices if not self.out_adj[v]]
            sink = cands[0] if len(cands) == 1 else None
        self.source = source
        self.sink = sink
        self.m = m
        self._layers: dict | None | bool = False

    @property
    def size(self) -> int:
        return len(self.vertices)

    def __repr__(self) -> str:
        return f"Abp(size={self.size}, edges={len(self.edges)}, m={self.m})"

    def variables(self) -> list[VarId]:
        return sorted({v for f in self.edges.values() for v in f.variables()})

    def is_zero_program(self) -> bool:
        return not self.edges and self.size == 2 and self.source != self.sink

    # -- structure ---------------------------------------------------------

    def topological_order(self) -> list:
        indeg = {v: len(self.in_adj[v]) for v in self.vertices}
        heap = [self.index[v] for v in self.vertices if indeg[v] == 0]
        heapq.heapify(heap)
        order = []
        while heap:
            v = self.vertices[heapq.heappop(heap)]
            order.append(v)
            for w, _ in self.out_adj[v]:
                indeg[w] -= 1
                if indeg[w] == 0:
                    heapq.heappush(heap, self.index[w])
        if len(order) != self.size:
            stuck = [v for v in self.vertices if indeg[v] > 0]
            raise AbpValidationError([("cycle through", stuck)])
        return order

    def check(self) -> None:
        """Raise AbpValidationError unless this is a valid ABP."""
        problems = []
        try:
            self.topological_order()
        except AbpValidationError as exc:
            problems.extend(exc.problems)
        if self.is_zero_program():
            if problems:
                raise AbpValidationError(problems)
            return
        sources = [v for v in self.vertices if not self.in_adj[v]]
        sinks = [v for v in self.vertices if not self.out_adj[v]]
        if self.source is None or sources != [self.source]:
            problems.append(("sources", sources))
        if self.sink is None or sinks != [self.sink]:
            problems.append(("sinks", sinks))
        if problems:
            raise AbpValidationError(problems)

    def layers(self) -> dict | None:
        """Layer of every vertex, or None if the program is not layered."""
        if self._layers is not False:
            return self._layers
        self.check()
        layer = {self.source: 0}
        result: dict | None = layer
        for u in self.topological_order():
            if u not in layer:
                continue
            for w, _ in self.out_adj[u]:
                if layer.setdefault(w, layer[u] + 1) != layer[u] + 1:
                    result = None
                    break
            if result is None:
                break
        if result is not None and self.is_zero_program():
            layer[self.sink] = 1
        self._layers = result
        return result

    def layer_lists(self) -> list[list]:
        layer = self.layers()
        if layer is None:
            raise NotLayeredError("ABP is not layered")
        out: list[list] = [[] for _ in range(max(layer.values()) + 1)]
        for v in self.vertices:
            out[layer[v]].append(v)
        return out

    def is_degree_layered(self) -> bool:
        return self.layers() is not None and all(
            f.is_linear() and not f.is_constant() for f in self.edges.values()
        )

    def validate(self) -> AbpReport:
        self.check()
        layer = self.layers()
        notes = []
        order = self.topological_order()
        degree: dict = {self.source: 0}
        degsets: dict = {self.source: {0}}
        for u in order:
            if u not in degree:
                continue
            for w, f in self.out_adj[u]:
                inc = set()
                if f.const:
                    inc |= degsets[u]
                if not f.is_constant():
                    inc |= {d + 1 for d in degsets[u]}
                degsets.setdefault(w, set()).update(inc)
                degree[w] = max(degree.get(w, 0), max(inc))
        homogeneous = all(len(s) == 1 for s in degsets.values())
        if self.is_zero_program():
            notes.append("zero program: no source-sink path")
        profile = [len(ls) for ls in self.layer_lists()] if layer is not None else []
        return AbpReport(
            size=self.size,
            is_layered=layer is not None,
            is_homogeneous=homogeneous,
            is_degree_layered=self.is_degree_layered(),
            layer_profile=profile,
            degree=degree.get(self.sink, 0),
            is_zero=self.is_zero_program(),
            notes=notes,
        )

    # -- semantics ---------------------------------------------------------

    def evaluate(self, a: Assignment) -> int:
        p = field.get_prime()
        val = {self.source: 1}
        for u in self.topological_order():
            x = val.get(u)
            if not x:
                continue
            for w, f in self.out_adj[u]:
                val[w] = (val.get(w, 0) + x * f.evaluate(a)) % p
        return val.get(self.sink, 0)

    def vertex_polynomials(self, cap: int = DEFAULT_CAP, upto=None) -> dict:
        """Polynomial computed at each vertex; ``upto`` restricts to a vertex set
        closed under predecessors (e.g. the first layers)."""
        polys: dict = {self.source: SparsePoly.constant(1)}
        total = 1
        for u in self.topological_order():
            if u not in polys:
                continue
            for w, f in self.out_adj[u]:
                if upto is not None and w not in upto:
                    continue
                term = polys[u] * f
                prev = polys.get(w)
                total += len(term)
                polys[w] = prev + term if prev is not None else term
                if total > cap:
                    raise CapExceededError(total, cap)
        return polys

    def polynomial(self, cap: int = DEFAULT_CAP) -> SparsePoly:
        return self.vertex_polynomials(cap).get(self.sink, SparsePoly())

    # -- rewriting -----------------------------------------------------------

    def pruned(self) -> Abp:
        """Drop vertices not on a source-sink path (with a warning)."""
        fwd = _reach(self.source, self.out_adj)
        bwd = _reach(self.sink, self.in_adj)
        keep = [v for v in self.vertices if v in fwd and v in bwd]
        if self.sink not in fwd:
            return zero_abp(self.m, self.source, self.sink)
        if len(keep) < self.size:
            dropped = [v for v in self.vertices if v not in keep]
            warnings.warn(f"pruned {len(dropped)} vertices not on a source-sink path: {dropped}")
        ks = set(keep)
        return Abp(
            keep,
            [(u, v, f) for (u, v), f in self.edges.items() if u in ks and v in ks],
            self.source,
            self.sink,
            self.m,
        )


def _reach(start, adj) -> set:
    seen = {start}
    stack = [start]
    while stack:
        u = stack.pop()
        for w, _ in adj[u]:
            if w not in seen:
                seen.add(w)
                stack.append(w)
    return seen


def zero_abp(m: int | None = None, source="s", sink="t") -> Abp:
    return Abp([source, sink], [], source, sink, m)


def single_edge_abp(label: AffineForm, m: int | None = None) -> Abp:
    return Abp(["s", "t"], [("s", "t", label)], "s", "t", m)


def compute_polynomial(g: Abp, cap: int = DEFAULT_CAP) -> SparsePoly:
    return g.polynomial(cap)


def evaluate(g: Abp, a: Assignment) -> int:
    return g.evaluate(a)


def validate(g: Abp) -> AbpReport:
    return g.validate()


def homogenize(g: Abp, d: int) -> Abp:
    """Degree-layered ABP computing the degree-``d`` component of ``g``.

    Every vertex v other than the source is split into copies (v, k) for
    degrees k = 0..d; an edge labelled ``l + c`` becomes constant edges
    (u, k) -> (v, k) and linear edges (u, k) -> (v, k + 1).  The vertices of
    degree k that receive a linear edge are the layer-k entry vertices; the
    constant-edge subgraph inside each degree is collapsed by summing path
    weights, which turns the program degree layered.  The result has at most
    ``(d + 1) * g.size`` vertices.
    """
    if d < 0:
        raise ValueError("degree must be nonnegative")
    g.check()
    p = field.get_prime()
    order = g.topological_order()
    pos = {v: i for i, v in enumerate(order)}
    src, snk = g.source, g.sink
    # constant and linear parts of each edge, indexed by tail vertex
    const_out = {v: [(w, f.const) for w, f in g.out_adj[v] if f.const] for v in order}
    lin_out = {v: [(w, f.linear_part()) for w, f in g.out_adj[v] if not f.is_constant()] for v in order}

    def const_closure(start) -> dict:
        # sum over constant paths start -> x of the product of constants
        acc = {start: 1}
        for x in order[pos[start]:]:
            c = acc.get(x)
            if not c:
                continue
            for w, k in const_out[x]:
                acc[w] = (acc.get(w, 0) + c * k) % p
        return acc

    closures: dict = {}

    def closure(v):
        if v not in closures:
            closures[v] = const_closure(v)
        return closures[v]

    if d == 0:
        c = closure(src).get(snk, 0)
        return single_edge_abp(AffineForm(c), g.m).pruned() if c else zero_abp(g.m)

    # entries[k]: vertices of g whose degree-k copy has an incoming linear edge
    entries: list[list] = [[src]]
    edges: list[tuple] = []
    for k in range(d):
        acc: dict = {}
        for v in entries[k]:
            cl = closure(v)
            for x in order:
                cx = cl.get(x)
                if not cx:
                    continue
                for w, lf in lin_out[x]:
                    acc[(v, w)] = acc[(v, w)] + lf * cx if (v, w) in acc else lf * cx
        nxt = sorted({w for (_, w) in acc}, key=pos.__getitem__)
        if k + 1 == d:
            # fold the final constant closure into the edges to the sink
            final: dict = {}
            for (v, w), lf in acc.items():
                cw = closure(w).get(snk, 0)
                if cw:
                    final[v] = final[v] + lf * cw if v in final else lf * cw
            for v, lf in final.items():
                edges.append(((v, k), ("sink", d), lf))
        else:
            for (v, w), lf in acc.items():
                edges.append(((v, k), (w, k + 1), lf))
            entries.append(nxt)
        if not nxt:
            break
    vertices = [(v, k) for k, layer in enumerate(entries) for v in layer] + [("sink", d)]
    out = Abp(vertices, edges, (src, 0), ("sink", d), g.m)
    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        out = out.pruned()
    return _relabel(out)


def _relabel(g: Abp) -> Abp:
    """Rename vertices to strings ``"v@k"`` so JSON round trips are exact."""
    names = {v: f"{v[0]}@{v[1]}" for v in g.vertices}
    return Abp(
        [names[v] for v in g.vertices],
        [(names[u], names[v], f) for (u, v), f in g.edges.items()],
        names[g.source],
        names[g.sink],
        g.m,
    )
