"""Seeded random ABPs for property tests and benchmarks."""

from __future__ import annotations

import numpy as np

from .abp import Abp
from .poly import AffineForm, VarId, matrix_vars


def _random_form(rng: np.random.Generator, variables: list[VarId], linear: bool, coeff_range: int = 3) -> AffineForm:
    while True:
        k = int(rng.integers(1, 3))
        picks = rng.choice(len(variables), size=k, replace=False)
        terms = [(variables[int(i)], int(rng.integers(-coeff_range, coeff_range + 1))) for i in picks]
        const = 0
        if not linear:
            kind = rng.random()
            if kind < 0.25:
                terms = []
            if kind < 0.6:
                const = int(rng.integers(-coeff_range, coeff_range + 1))
        f = AffineForm(const, terms)
        if not f.is_zero():
            return f


def random_abp(seed: int, size: int, max_depth: int = 5, m: int = 2, edge_prob: float = 0.35) -> Abp:
    """General (usually non-layered) ABP with affine labels.

    Vertices get depths 0..D (source 0, sink D) and edges only go to strictly
    deeper vertices, so every path has at most ``D <= max_depth`` edges and
    the polynomial has degree at most D.
    """
    if size < 2:
        raise ValueError("size must be at least 2")
    rng = np.random.default_rng([seed, 1])
    variables = matrix_vars(m)
    depth_cap = min(max_depth, size - 1)
    D = int(rng.integers(min(2, depth_cap), depth_cap + 1))
    depth = [0] + sorted(int(rng.integers(1, D)) for _ in range(size - 2)) + [D]
    names = [f"v{i}" for i in range(size)]
    edges = []
    for j in range(1, size):
        preds = [i for i in range(j) if depth[i] < depth[j]]
        chosen = [i for i in preds if rng.random() < edge_prob] or [int(rng.choice(preds))]
        for i in chosen:
            edges.append((names[i], names[j], _random_form(rng, variables, linear=False)))
    for i in range(1, size - 1):
        if not any(e[0] == names[i] for e in edges):
            succ = [j for j in range(i + 1, size) if depth[j] > depth[i]]
            edges.append((names[i], names[int(rng.choice(succ))], _random_form(rng, variables, linear=False)))
    return Abp(names, edges, names[0], names[-1], m)


def random_layered_abp(
    seed: int,
    max_size: int = 40,
    m: int = 3,
    linear: bool = True,
    max_layers: int = 6,
) -> Abp:
    """Layered ABP with at most ``max_size`` vertices; labels linear if ``linear``."""
    rng = np.random.default_rng([seed, 2])
    variables = matrix_vars(m)
    depth = int(rng.integers(1, max_layers + 1))
    budget = max_size - 2
    widths = [1]
    for k in range(1, depth):
        room = budget - (depth - 1 - k)
        w = int(rng.integers(1, max(1, min(6, room)) + 1))
        budget -= w
        widths.append(w)
    widths.append(1)
    layers = [[f"L{k}.{i}" for i in range(w)] for k, w in enumerate(widths)]
    edges = []
    for k in range(1, len(layers)):
        for w in layers[k]:
            for u in layers[k - 1]:
                if rng.random() < 0.6:
                    edges.append((u, w, _random_form(rng, variables, linear)))
            if not any(e[1] == w for e in edges):
                edges.append((layers[k - 1][int(rng.integers(len(layers[k - 1])))], w, _random_form(rng, variables, linear)))
        for u in layers[k - 1]:
            if not any(e[0] == u for e in edges):
                edges.append((u, layers[k][int(rng.integers(len(layers[k])))], _random_form(rng, variables, linear)))
    vertices = [v for layer in layers for v in layer]
    return Abp(vertices, edges, layers[0][0], layers[-1][0], m)
