"""``abpkit`` command line: JSON pipelines over ABPs, determinantal and IMM
expressions.

Every stage reads one JSON document (``--input`` or stdin) and writes one
(``--output`` or stdout); ``emit --format text`` is the only lossy stage.
The effective configuration is echoed to stderr on every run.

Exit codes: 0 success / verified, 1 falsified verification or failed
certificate, 2 usage, schema or precondition error.
"""

from __future__ import annotations

import argparse
import contextlib
import json
import os
import sys
from pathlib import Path

from . import field, serialize
from .abp import Abp, AbpValidationError, homogenize
from .detexpr import (
    DetExpr,
    abp_to_detexpr,
    check_lemma_properties,
    emit_text,
    find_monomial_witness,
    profile,
    restrict,
    standardize,
)
from .imm import (
    HimmExpr,
    check_block_multilinear,
    dlabp_to_himm,
    grenet_dlabp,
    grenet_perm,
    grouping,
    himm_to_dlabp,
    labp_to_imm,
    to_matrix_power,
)
from .lowerbound import certified_total, certify_binomial_bound, certify_nosqueeze
from .mahajan_vinay import build_mv_abp
from .pit import pit_equal, target_evaluator
from .poly import DEFAULT_CAP, CapExceededError, MissingVariableError, VarId, parse_var

EXIT_OK, EXIT_FALSE, EXIT_USAGE = 0, 1, 2
REPRODUCE_MS = (3, 4, 5)


class UsageError(Exception):
    """Bad input or violated precondition; reported with exit code 2."""


# -- io ------------------------------------------------------------------------


def _read_doc(args) -> dict:
    try:
        if args.input and args.input != "-":
            text = Path(args.input).read_text()
        else:
            text = sys.stdin.read()
    except OSError as exc:
        raise UsageError(f"cannot read input: {exc}") from exc
    try:
        return json.loads(text)
    except json.JSONDecodeError as exc:
        raise UsageError(f"input is not valid JSON: {exc}") from exc


def _load(args):
    return serialize.from_json(_read_doc(args))


def _write(args, text: str) -> None:
    if args.output and args.output != "-":
        Path(args.output).write_text(text)
    else:
        sys.stdout.write(text)


def _write_doc(args, doc: dict) -> None:
    _write(args, serialize.dumps(doc))


def _load_abp(args) -> Abp:
    obj = _load(args)
    if isinstance(obj, HimmExpr):
        return himm_to_dlabp(obj)
    if not isinstance(obj, Abp):
        raise UsageError(f"expected an ABP document, got {type(obj).__name__}")
    return obj


def _load_detexpr(args) -> tuple[DetExpr, int]:
    obj = _load(args)
    if not isinstance(obj, tuple):
        raise UsageError(f"expected a determinantal expression, got {type(obj).__name__}")
    return obj


def _load_himm(args) -> HimmExpr:
    obj = _load(args)
    if isinstance(obj, Abp):
        return dlabp_to_himm(obj)
    if not isinstance(obj, HimmExpr):
        raise UsageError(f"expected a himm document, got {type(obj).__name__}")
    return obj


def _parse_index_list(text: str) -> list[int]:
    try:
        out = [int(t) for t in text.replace(" ", "").split(",") if t]
    except ValueError as exc:
        raise UsageError(f"expected comma-separated integers, got {text!r}") from exc
    if not out or min(out) < 1:
        raise UsageError(f"indices must be positive, got {text!r}")
    return out


def _parse_monomial(text: str) -> list[VarId]:
    try:
        return [parse_var(t) for t in text.replace(" ", "").split(",") if t]
    except ValueError as exc:
        raise UsageError(str(exc)) from exc


# -- subcommands -------------------------------------------------------------------


def cmd_generate(args) -> int:
    if args.what == "mv-det":
        g = build_mv_abp(args.m)
        if args.emit_matrix:
            expr, _ = abp_to_detexpr(g, "det", args.m)
            _write(args, emit_text(expr))
        else:
            _write_doc(args, serialize.to_json(g))
    elif args.what == "grenet-perm":
        _write_doc(args, serialize.to_json(grenet_dlabp(args.m) if args.dlabp else grenet_perm(args.m)))
    return EXIT_OK


def cmd_convert(args) -> int:
    what = args.what
    if what == "abp-to-det":
        g = _load_abp(args)
        expr, sign = abp_to_detexpr(g, args.target, args.m if args.m is not None else g.m)
        if args.fold_sign and sign == -1:
            expr = expr.with_entries({pos: (-f if pos[0] == 0 else f) for pos, f in expr.entries.items()})
            sign = 1
        _write_doc(args, serialize.detexpr_to_json(expr, sign))
    elif what == "dlabp-to-himm":
        _write_doc(args, serialize.to_json(dlabp_to_himm(_load_abp(args))))
    elif what == "himm-to-dlabp":
        _write_doc(args, serialize.to_json(himm_to_dlabp(_load_himm(args))))
    elif what == "labp-to-imm":
        _write_doc(args, serialize.to_json(labp_to_imm(_load_abp(args))))
    elif what == "to-matrix-power":
        _write_doc(args, serialize.to_json(to_matrix_power(_load_abp(args))))
    return EXIT_OK


def _signed_evaluator(obj):
    if isinstance(obj, tuple):
        expr, sign = obj
        return lambda a: sign * expr.evaluate(a)
    return obj.evaluate


def cmd_verify(args) -> int:
    obj = _load(args)
    result = pit_equal(_signed_evaluator(obj), target_evaluator(args.target, args.m), args.m, args.m, args.trials, args.seed)
    doc = {"kind": "pit", "target": args.target, "m": args.m, **result.to_json()}
    _write_doc(args, doc)
    return EXIT_OK if result.equal else EXIT_FALSE


def cmd_analyze(args) -> int:
    if args.what == "abp":
        _write_doc(args, {"kind": "abp_report", **_load_abp(args).validate().to_json()})
        return EXIT_OK
    expr, sign = _load_detexpr(args)
    doc: dict = {"kind": "detexpr_report", "n": expr.n, "sign": sign}
    want_profile = args.profile or not (args.lemma or args.witness)
    if want_profile:
        doc["profile"] = profile(expr, rational=args.rational).to_json()
    if args.lemma:
        rep = check_lemma_properties(expr)
        doc["lemma"] = rep.to_json()
        if expr.m is not None:
            doc["lemma"]["holds"] = rep.holds(expr.m)
    if args.witness:
        w = find_monomial_witness(expr, _parse_monomial(args.witness))
        doc["witness"] = None if w is None else {"pi": list(w.pi), "k": w.k, "l": w.l}
    _write_doc(args, doc)
    return EXIT_OK


def cmd_transform(args) -> int:
    if args.homogenize is not None:
        _write_doc(args, serialize.to_json(homogenize(_load_abp(args), args.homogenize)))
        return EXIT_OK
    expr, sign = _load_detexpr(args)
    if args.standardize:
        expr = standardize(expr, fold=True).expr
    else:
        expr = restrict(expr, seed=args.seed)
    _write_doc(args, serialize.detexpr_to_json(expr, sign))
    return EXIT_OK


def _table(certs) -> str:
    lines = ["layer  vertices  rank  bound  holds"]
    lines += [f"{c.layer:>5}  {c.vertex_count:>8}  {c.coeff_rank:>4}  {c.bound:>5}  {c.holds}" for c in certs]
    return "\n".join(lines) + "\n"


def cmd_certify(args) -> int:
    g = _load_abp(args)
    if args.what == "binomial":
        certs = certify_binomial_bound(g, args.target, args.m, args.trials, args.seed, args.cap)
        doc = {
            "kind": "certificates",
            "target": args.target,
            "m": args.m,
            "certificates": [c.to_json() for c in certs],
            "total": certified_total(certs),
        }
    else:
        certs = [certify_nosqueeze(g, _parse_index_list(args.rows), _parse_index_list(args.cols), args.prefix_layers, args.cap)]
        doc = {"kind": "certificates", "certificates": [c.to_json() for c in certs]}
    sys.stderr.write(_table(certs))
    _write_doc(args, doc)
    return EXIT_OK if all(c.holds for c in certs) else EXIT_FALSE


def cmd_check(args) -> int:
    rep = check_block_multilinear(_load_himm(args), grouping(args.grouping))
    _write_doc(args, {"kind": "multilinear_report", "grouping": args.grouping, **rep.to_json()})
    return EXIT_OK if rep.ok else EXIT_FALSE


def cmd_emit(args) -> int:
    doc = _read_doc(args)
    obj = serialize.from_json(doc)
    if args.format == "json":
        _write(args, serialize.dumps(doc))
    elif isinstance(obj, tuple):
        _write(args, emit_text(obj[0]))
    else:
        raise UsageError("text emission is defined for determinantal expressions only")
    return EXIT_OK


def cmd_reproduce(args) -> int:
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    for m in REPRODUCE_MS:
        expr, _ = abp_to_detexpr(build_mv_abp(m), "det", m)
        path = out / f"mv_det_m{m}.txt"
        path.write_text(emit_text(expr))
        sys.stderr.write(f"wrote {path}\n")
    return EXIT_OK


# -- parser ----------------------------------------------------------------------


def _env_int(name: str, default: int) -> int:
    raw = os.environ.get(name)
    if raw is None:
        return default
    try:
        return int(raw)
    except ValueError:
        raise UsageError(f"{name} must be an integer, got {raw!r}") from None


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--seed", type=int, default=None, help="64-bit PRNG seed (default $ABPKIT_SEED or 0)")
    common.add_argument("--prime", type=int, default=None, help="field modulus (default $ABPKIT_PRIME or 2^61-1)")
    common.add_argument("--trials", type=int, default=20, help="PIT trials (default 20)")
    common.add_argument("--cap", type=int, default=DEFAULT_CAP, help=f"symbolic expansion term cap (default {DEFAULT_CAP})")
    common.add_argument("--input", "-i", default=None, help="input JSON file (default stdin)")
    common.add_argument("--output", "-o", default=None, help="output file (default stdout)")

    parser = argparse.ArgumentParser(
        prog="abpkit",
        description="Construct, convert, verify and analyze algebraic branching programs, "
        "determinantal expressions and iterated matrix multiplication expressions over F_p.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("generate", help="build a known program")
    gsub = p.add_subparsers(dest="what", required=True)
    g = gsub.add_parser(
        "mv-det",
        parents=[common],
        help="layered ABP for det_m with m^3/3 - m/3 + 2 vertices (clow-sequence construction)",
    )
    g.add_argument("--m", type=int, required=True)
    fmt = g.add_mutually_exclusive_group()
    fmt.add_argument("--json", action="store_true", help="ABP as JSON (default)")
    fmt.add_argument("--emit-matrix", action="store_true", help="print the matrix of the derived determinantal expression")
    g.set_defaults(func=cmd_generate)
    g = gsub.add_parser(
        "grenet-perm",
        parents=[common],
        help="column-wise multilinear IMM for perm_m of size 2^m - 1 (subset construction)",
    )
    g.add_argument("--m", type=int, required=True)
    g.add_argument("--dlabp", action="store_true", help="emit the degree-layered ABP instead of the IMM")
    g.set_defaults(func=cmd_generate)

    p = sub.add_parser("convert", help="change representation")
    csub = p.add_subparsers(dest="what", required=True)
    c = csub.add_parser(
        "abp-to-det",
        parents=[common],
        help="regular determinantal expression of size |V|-1 from a layered ABP "
        "(source and sink merged, loops on the other vertices)",
    )
    c.add_argument("--target", choices=["det", "perm", "generic"], default="generic")
    c.add_argument("--m", type=int, default=None, help="variable matrix size (default: taken from the ABP)")
    c.add_argument("--fold-sign", action="store_true", help="negate the first row instead of reporting sign -1")
    c.set_defaults(func=cmd_convert)
    for name, text in (
        ("dlabp-to-himm", "homogeneous IMM with one fewer vertex than the degree-layered ABP"),
        ("himm-to-dlabp", "degree-layered ABP with one more vertex than the homogeneous IMM"),
        ("labp-to-imm", "trace-form IMM of dimension size-1 from a layered ABP"),
        ("to-matrix-power", "square matrix A with trace(A^k) equal to the ABP's polynomial"),
    ):
        c = csub.add_parser(name, parents=[common], help=text)
        c.set_defaults(func=cmd_convert)

    p = sub.add_parser(
        "verify",
        parents=[common],
        help="randomized identity test against det_m or perm_m; exit 1 with a witness on mismatch",
    )
    p.add_argument("--target", choices=["det", "perm"], required=True)
    p.add_argument("--m", type=int, required=True)
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("analyze", help="structural reports")
    asub = p.add_subparsers(dest="what", required=True)
    a = asub.add_parser(
        "det-expr",
        parents=[common],
        help="rank/read profile, first-row/column properties of standard expressions, monomial witnesses",
    )
    a.add_argument("--profile", action="store_true", help="rank and read of every coefficient matrix")
    a.add_argument("--rational", action="store_true", help="also compute ranks over Q")
    a.add_argument("--lemma", action="store_true", help="properties (I)-(III) of a standard expression")
    a.add_argument("--witness", metavar="VARS", help="degree-3 monomial such as y11,y22,y33")
    a.set_defaults(func=cmd_analyze)
    a = asub.add_parser("abp", parents=[common], help="size, layering, homogeneity and degree of an ABP")
    a.set_defaults(func=cmd_analyze)

    p = sub.add_parser("transform", parents=[common], help="normalize or shrink an expression")
    mode = p.add_mutually_exclusive_group(required=True)
    mode.add_argument(
        "--standardize",
        action="store_true",
        help="bring the constant part to diag(0,1,...,1) preserving the determinant",
    )
    mode.add_argument(
        "--restrict",
        action="store_true",
        help="expression for P_{m-1} from one for P_m (last row/column of variables removed)",
    )
    mode.add_argument("--homogenize", type=int, metavar="D", help="degree-layered ABP for the degree-D component")
    p.set_defaults(func=cmd_transform)

    p = sub.add_parser("certify", help="coefficient-rank lower-bound certificates for a given program")
    ksub = p.add_subparsers(dest="what", required=True)
    k = ksub.add_parser(
        "binomial",
        parents=[common],
        help="layer s of a column-wise multilinear program for det_m/perm_m has >= C(m,s) vertices",
    )
    k.add_argument("--target", choices=["det", "perm"], required=True)
    k.add_argument("--m", type=int, required=True)
    k.set_defaults(func=cmd_certify)
    k = ksub.add_parser(
        "nosqueeze",
        parents=[common],
        help="a submatrix confined to the first L layers forces >= C(R,L) vertices on layer L",
    )
    k.add_argument("--rows", required=True, help="comma-separated row indices")
    k.add_argument("--cols", required=True, help="comma-separated column indices")
    k.add_argument("--prefix-layers", type=int, required=True)
    k.set_defaults(func=cmd_certify)

    p = sub.add_parser("check", help="syntactic checks")
    hsub = p.add_subparsers(dest="what", required=True)
    h = hsub.add_parser("multilinear", parents=[common], help="each IMM factor uses variables of one group only")
    h.add_argument("--grouping", choices=["column", "row"], default="column")
    h.set_defaults(func=cmd_check)

    p = sub.add_parser("emit", parents=[common], help="terminal stage: canonical JSON or the matrix as text")
    p.add_argument("--format", choices=["text", "json"], default="text")
    p.set_defaults(func=cmd_emit)

    p = sub.add_parser(
        "reproduce-paper",
        parents=[common],
        help="write the determinantal matrices for det_3, det_4, det_5 as mv_det_m{3,4,5}.txt",
    )
    p.add_argument("--out", required=True, help="output directory")
    p.set_defaults(func=cmd_reproduce)
    return parser


def run(argv: list[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        if args.seed is None:
            args.seed = _env_int("ABPKIT_SEED", 0)
        if args.trials < 1 or args.cap < 1:
            raise UsageError("--trials and --cap must be positive")
        prime_ctx = field.use_prime(args.prime) if args.prime is not None else contextlib.nullcontext()
        with prime_ctx:
            sys.stderr.write(
                f"abpkit: seed={args.seed} prime={field.get_prime()} trials={args.trials} cap={args.cap}\n"
            )
            return args.func(args)
    except (
        UsageError,
        serialize.SchemaError,
        AbpValidationError,
        CapExceededError,
        MissingVariableError,
        ValueError,
    ) as exc:
        sys.stderr.write(f"abpkit: error: {exc}\n")
        return EXIT_USAGE


def main() -> None:
    sys.exit(run())


if __name__ == "__main__":
    main()
