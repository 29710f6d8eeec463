"""One test per acceptance criterion; the terminal summary prints a
PASS/FAIL line for each (see conftest.py)."""

import itertools
import json
import math
import random
import time
from fractions import Fraction
from pathlib import Path

import pytest
from _support import assignment_from, laplace_det, leibniz, scramble

from abpkit import field
from abpkit.abp import homogenize
from abpkit.cli import run
from abpkit.detexpr import (
    EliminationConjugation,
    FirstColumnOp,
    FirstRowOp,
    PermutationConjugation,
    abp_to_detexpr,
    apply_group_op,
    check_lemma_properties,
    find_monomial_witness,
    profile,
    restrict,
    standardize,
)
from abpkit.generators import random_abp, random_layered_abp
from abpkit.imm import (
    check_block_multilinear,
    column_grouping,
    dlabp_to_himm,
    grenet_dlabp,
    grenet_perm,
    himm_to_dlabp,
    labp_to_imm,
    to_matrix_power,
)
from abpkit.linalg import rank_mod
from abpkit.lowerbound import certified_total, certify_binomial_bound
from abpkit.mahajan_vinay import build_mv_abp
from abpkit.oracles import det_reference, perm_naive, perm_reference
from abpkit.pit import expand_symbolic, pit_equal, target_evaluator
from abpkit.poly import VarId
from abpkit.serialize import dumps, from_json, to_json

GOLDEN = Path(__file__).parent / "golden"
P61 = 2**61 - 1


class Budget:
    def __init__(self, seconds):
        self.seconds = seconds

    def __enter__(self):
        self.start = time.perf_counter()
        return self

    def __exit__(self, *exc):
        self.elapsed = time.perf_counter() - self.start
        if exc[0] is None:
            assert self.elapsed < self.seconds, f"took {self.elapsed:.1f}s, budget {self.seconds}s"


@pytest.fixture(autouse=True)
def default_prime():
    with field.use_prime(P61):
        yield


@pytest.mark.criterion(1, "MV vertex count m^3/3 - m/3 + 2 and per-layer counts, m = 2..10")
def test_criterion_01_mv_size():
    with Budget(1):
        for m in range(2, 11):
            assert (m**3 - m) % 3 == 0
            g = build_mv_abp(m)
            assert g.size == (m**3 - m) // 3 + 2
            layers = g.layer_lists()
            assert len(layers[0]) == len(layers[m]) == 1
            for i in range(1, m):
                assert len(layers[i]) == 1 + sum(min(i, u) for u in range(2, m + 1))
        assert build_mv_abp(3).size == 10


@pytest.mark.criterion(2, "reproduce-paper writes the m = 3, 4, 5 matrices token-for-token")
def test_criterion_02_golden(tmp_path, capsys):
    with Budget(1):
        assert run(["reproduce-paper", "--out", str(tmp_path)]) == 0
        for m, n in ((3, 9), (4, 21), (5, 41)):
            got = (tmp_path / f"mv_det_m{m}.txt").read_text().split("\n")
            want = (GOLDEN / f"mv_det_m{m}.txt").read_text().split("\n")
            got_tokens = [line.split() for line in got if line.strip()]
            want_tokens = [line.split() for line in want if line.strip()]
            assert len(want_tokens) == n and all(len(row) == n for row in want_tokens)
            assert got_tokens == want_tokens


@pytest.mark.criterion(3, "MV-ABP(m) computes det_m: PIT for m = 2..8, symbolic for m <= 4")
def test_criterion_03_mv_correct():
    with Budget(10):
        for m in range(2, 9):
            r = pit_equal(build_mv_abp(m), lambda a, m=m: det_reference(m, a), m, m, trials=20, seed=m)
            assert r.equal and r.trials == 20
            assert r.error_bound <= Fraction(m, P61) ** 20
        for m in range(2, 5):
            assert expand_symbolic(build_mv_abp(m)) == leibniz(m, signed=True)


@pytest.mark.criterion(4, "abp_to_detexpr on MV-ABP(m), m = 2..8: regular, n = size - 1, sign (-1)^(m+1)")
def test_criterion_04_regular_conversion():
    with Budget(10):
        for m in range(2, 9):
            g = build_mv_abp(m)
            e, sign = abp_to_detexpr(g, "det", m)
            lam = e.lam
            assert e.n == g.size - 1
            assert rank_mod(lam) == e.n - 1
            assert all(lam[i][j] == 0 for i in range(1, e.n) for j in range(i + 1, e.n))
            assert sign == (-1) ** (m + 1)
            assert pit_equal(lambda a: sign * e.evaluate(a), target_evaluator("det", m), m, m, trials=20).equal


@pytest.mark.criterion(5, "Grenet IMM: size 2^m - 1 (m <= 12), column-wise multilinear, computes perm_m (m = 2..7)")
def test_criterion_05_grenet():
    with Budget(20):
        for m in range(1, 13):
            h = grenet_perm(m)
            assert h.size == 2**m - 1
            assert check_block_multilinear(h, column_grouping()).ok
        for m in range(2, 8):
            assert pit_equal(grenet_perm(m), target_evaluator("perm", m), m, m, trials=20).equal


@pytest.mark.criterion(6, "binomial certificates on Grenet dlabp: rank C(m,s) = layer size, total 2^m - 1, m = 3..6")
def test_criterion_06_certificates():
    with Budget(60):
        for m in range(3, 7):
            certs = certify_binomial_bound(grenet_dlabp(m), "perm", m)
            for c in certs:
                assert c.coeff_rank == c.vertex_count == math.comb(m, c.layer)
                assert c.holds
            assert certified_total(certs) == 2**m - 1


@pytest.mark.criterion(7, "size identities himm/dlabp, labp/imm and trace(A^k) on 50 random ABPs")
def test_criterion_07_measures():
    with Budget(30):
        for seed in range(50):
            g = random_layered_abp(seed, max_size=40, m=3, linear=True)
            assert g.size <= 40 and g.is_degree_layered()
            h = dlabp_to_himm(g)
            assert h.size == g.size - 1
            back = himm_to_dlabp(h)
            assert back.size == h.size + 1 and dlabp_to_himm(back) == h
            mp = to_matrix_power(g)
            assert mp.n == g.size - 1
            assert pit_equal(mp, g, 9, mp.power, trials=20, seed=seed).equal
            assert pit_equal(h, g, 9, mp.power, trials=20, seed=seed).equal

            lg = random_layered_abp(seed, max_size=40, m=3, linear=False)
            t = labp_to_imm(lg)
            assert t.n == lg.size - 1
            assert pit_equal(t, lg, 9, len(t.mats), trials=20, seed=seed).equal


@pytest.mark.criterion(8, "homogenize on 50 random ABPs: degree layered, size <= (d+1) size, degree-d component")
def test_criterion_08_homogenize():
    with Budget(30):
        rng = random.Random(8)
        for seed in range(50):
            g = random_abp(seed, size=rng.randint(2, 30), max_depth=5, m=2)
            assert g.size <= 30
            poly = expand_symbolic(g)
            assert poly.degree() <= 5
            for d in range(1, 6):
                h = homogenize(g, d)
                assert h.validate().is_degree_layered
                assert h.size <= (d + 1) * g.size
                comp = poly.homogeneous_component(d)
                assert pit_equal(h, comp, 4, d, trials=20, seed=seed).equal


def _monomials3():
    return [[VarId(i + 1, s[i] + 1) for i in range(3)] for s in itertools.permutations(range(3))]


@pytest.mark.criterion(9, "standardize, lemma properties, monomial witnesses and restriction")
def test_criterion_09_machinery():
    with Budget(30):
        exprs = {
            "det": abp_to_detexpr(build_mv_abp(3), "det", 3),
            "perm": abp_to_detexpr(grenet_dlabp(3), "perm", 3),
        }
        for target, (e, sign) in exprs.items():
            for seed in range(3):
                mixed, _ = scramble(e, seed)
                assert mixed.n <= 12 and not mixed.is_standard()
                std = standardize(mixed, fold=True).expr
                assert std.is_standard()
                assert std.polynomial() == mixed.polynomial()
                rep = check_lemma_properties(std)
                assert rep.prop_I and rep.prop_II
                assert rep.prop_III_col >= 3 and rep.prop_III_row >= 3
                for mono in _monomials3():
                    assert find_monomial_witness(std, mono) is not None

        cases = [(build_mv_abp(m), "det", m) for m in range(3, 7)]
        cases += [(grenet_dlabp(m), "perm", m) for m in range(3, 7)]
        for g, target, m in cases:
            e, sign = abp_to_detexpr(g, target, m)
            r = restrict(e, seed=m)
            assert r.is_regular() and r.m == m - 1
            assert pit_equal(lambda a: sign * r.evaluate(a), target_evaluator(target, m - 1), m - 1, m - 1).equal
            before, after = profile(e), profile(r)
            for v, rank in after.rank_per_var.items():
                assert rank <= before.rank_per_var[v]
                assert after.read_per_var[v] <= before.read_per_var[v]


@pytest.mark.criterion(10, "property suites: field axioms, oracles, PIT reflexivity, group ops, JSON stability")
def test_criterion_10_properties():
    with Budget(60):
        rng = random.Random(10)
        p = P61
        for _ in range(10_000):
            a, b, c = (rng.randrange(p) for _ in range(3))
            assert (a + b) % p == (b + a) % p and a * b % p == b * a % p
            assert (a + b + c) % p == (a + (b + c)) % p
            assert a * b % p * c % p == a * (b * c % p) % p
            assert a * (b + c) % p == (a * b + a * c) % p
            if a:
                assert a * field.inv(a) % p == 1

        for m in range(1, 7):
            for _ in range(100):
                mat = [[rng.randrange(p) for _ in range(m)] for _ in range(m)]
                a = assignment_from(mat)
                assert det_reference(m, a) == laplace_det(mat) % p
                assert perm_reference(m, a) == perm_naive(m, a)

        for seed in range(20):
            for target in ("det", "perm"):
                f = target_evaluator(target, 4)
                assert pit_equal(f, f, 4, 4, trials=20, seed=seed).equal

        e, sign = abp_to_detexpr(build_mv_abp(3), "det", 3)
        n = e.n
        for _ in range(200):
            i, j = rng.sample(range(2, n + 1), 2)
            alpha = rng.randrange(1, p)
            for op, inv in (
                (PermutationConjugation(i, j), PermutationConjugation(i, j)),
                (EliminationConjugation(alpha, i, j), EliminationConjugation(-alpha, i, j)),
                (FirstColumnOp(alpha, j), FirstColumnOp(-alpha, j)),
                (FirstRowOp(alpha, j), FirstRowOp(-alpha, j)),
            ):
                out = apply_group_op(e, op)
                assert apply_group_op(out, inv) == e
                assert out.is_standard()
        for op in (PermutationConjugation(2, 9), EliminationConjugation(5, 3, 7), FirstRowOp(4, 6)):
            assert apply_group_op(e, op).polynomial() == e.polynomial()

        docs = [
            to_json(build_mv_abp(4)),
            to_json(e, sign=sign),
            to_json(grenet_perm(4)),
            to_json(labp_to_imm(build_mv_abp(3))),
            to_json(to_matrix_power(grenet_dlabp(3))),
        ]
        docs += [to_json(random_abp(s, 20, 5, 3)) for s in range(20)]
        for doc in docs:
            text = dumps(doc)
            obj = from_json(json.loads(text))
            again = to_json(obj[0], sign=obj[1]) if isinstance(obj, tuple) else to_json(obj)
            assert dumps(again) == text
