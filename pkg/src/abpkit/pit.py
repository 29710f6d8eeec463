"""Randomized polynomial identity testing (Schwartz-Zippel).

Randomness: trial ``i`` of a run with seed ``s`` draws its evaluation point
from numpy's PCG64 generator seeded with ``SeedSequence([s, i])``: one 64-bit
integer per variable, built from two 32-bit draws and reduced mod p, in the
order the variables are listed.  Verdicts are
therefore reproducible from ``(seed, inputs)`` and independent of how trials
are scheduled.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Callable, Sequence

import numpy as np

from . import field
from .oracles import det_polynomial, det_reference, perm_polynomial, perm_reference
from .poly import DEFAULT_CAP, Assignment, SparsePoly, VarId, matrix_vars

Evaluator = Callable[[Assignment], int]


def trial_rng(seed: int, trial: int) -> np.random.Generator:
    return np.random.Generator(np.random.PCG64(np.random.SeedSequence([seed & (2**64 - 1), trial])))


def random_point(variables: Sequence[VarId], rng: np.random.Generator) -> dict[VarId, int]:
    p = field.get_prime()
    # two 32-bit halves keep the draw exact for any p < 2^64
    hi = rng.integers(0, 2**32, size=len(variables), dtype=np.uint64)
    lo = rng.integers(0, 2**32, size=len(variables), dtype=np.uint64)
    return {v: ((int(h) << 32) | int(l)) % p for v, h, l in zip(variables, hi, lo)}


def as_evaluator(obj) -> Evaluator:
    if callable(obj) and not hasattr(obj, "evaluate"):
        return obj
    return obj.evaluate


def target_evaluator(target: str, m: int) -> Evaluator:
    if target == "det":
        return lambda a: det_reference(m, a)
    if target == "perm":
        return lambda a: perm_reference(m, a)
    raise ValueError(f"unknown target {target!r} (expected 'det' or 'perm')")


def target_polynomial(target: str, m: int) -> SparsePoly:
    if target == "det":
        return det_polynomial(m)
    if target == "perm":
        return perm_polynomial(m)
    raise ValueError(f"unknown target {target!r} (expected 'det' or 'perm')")


def _log10(x: Fraction) -> float | None:
    if x == 0:
        return None
    return math.log10(x.numerator) - math.log10(x.denominator)


@dataclass
class PitResult:
    equal: bool
    trials: int
    error_bound: Fraction
    witness: dict[VarId, int] | None = None
    values: tuple[int, int] | None = None
    seed: int = 0

    def __bool__(self) -> bool:
        return self.equal

    def to_json(self) -> dict:
        out = {
            "equal": self.equal,
            "trials": self.trials,
            "seed": self.seed,
            # the bound itself underflows a double for any useful p
            "error_bound_log10": _log10(self.error_bound),
        }
        if self.witness is not None:
            out["witness"] = [
                {"row": v.row, "col": v.col, "value": x} for v, x in sorted(self.witness.items())
            ]
            out["values"] = list(self.values)
        return out


def pit_equal(
    f,
    g,
    variables: Sequence[VarId] | int,
    max_degree: int,
    trials: int = 20,
    seed: int = 0,
) -> PitResult:
    """Compare two evaluators at ``trials`` random points.

    ``variables`` is the variable universe, or an int m for the m x m matrix
    variables.  On equality the reported bound ``(max_degree / p) ** trials``
    caps the probability that ``f != g`` went unnoticed.
    """
    if trials < 1:
        raise ValueError("trials must be >= 1")
    if isinstance(variables, int):
        variables = matrix_vars(variables)
    fe, ge = as_evaluator(f), as_evaluator(g)
    p = field.get_prime()
    for t in range(trials):
        point = random_point(variables, trial_rng(seed, t))
        fv, gv = fe(point), ge(point)
        if fv % p != gv % p:
            return PitResult(False, t + 1, Fraction(0), point, (fv % p, gv % p), seed)
    return PitResult(True, trials, Fraction(max(max_degree, 0), p) ** trials, seed=seed)


def expand_symbolic(obj, cap: int = DEFAULT_CAP) -> SparsePoly:
    """Exact polynomial of an ABP, determinantal or IMM expression.

    ``obj`` may also be ``("det", m)`` or ``("perm", m)`` for the references.
    """
    if isinstance(obj, tuple) and len(obj) == 2 and isinstance(obj[0], str):
        return target_polynomial(*obj)
    if isinstance(obj, SparsePoly):
        return obj
    if not hasattr(obj, "polynomial"):
        raise TypeError(f"cannot expand {type(obj).__name__} symbolically")
    return obj.polynomial(cap=cap)
