"""JSON documents for ABPs, determinantal expressions and IMM expressions.

Every document carries a ``kind`` key.  Integers are written as signed
representatives mod p, keys in a fixed order, so load/dump round trips are
byte-stable.
"""

from __future__ import annotations

import json
from typing import Any

from . import field
from .abp import Abp
from .detexpr import DetExpr
from .imm import AffineMatrix, HimmExpr, ImmExpr, MatrixPowerExpr
from .poly import AffineForm, VarId


class SchemaError(ValueError):
    pass


def vertex_name(v) -> str:
    if isinstance(v, tuple):
        return ",".join(map(str, v))
    return str(v)


def form_to_json(f: AffineForm) -> dict:
    return {
        "const": field.signed(f.const),
        "terms": [{"row": v.row, "col": v.col, "coeff": field.signed(c)} for v, c in f.items()],
    }


def form_from_json(d: Any) -> AffineForm:
    try:
        return AffineForm(int(d.get("const", 0)), [(VarId(int(t["row"]), int(t["col"])), int(t["coeff"])) for t in d.get("terms", [])])
    except (AttributeError, KeyError, TypeError, ValueError) as exc:
        raise SchemaError(f"malformed affine form {d!r}") from exc


def abp_to_json(g: Abp) -> dict:
    return {
        "kind": "abp",
        "m": g.m,
        "vertices": [vertex_name(v) for v in g.vertices],
        "source": vertex_name(g.source),
        "sink": vertex_name(g.sink),
        "edges": [
            {"from": vertex_name(u), "to": vertex_name(v), "label": form_to_json(f)} for (u, v), f in g.edges.items()
        ],
    }


def abp_from_json(d: dict) -> Abp:
    try:
        return Abp(
            d["vertices"],
            [(e["from"], e["to"], form_from_json(e["label"])) for e in d["edges"]],
            d["source"],
            d["sink"],
            d.get("m"),
        )
    except (KeyError, TypeError) as exc:
        raise SchemaError(f"malformed ABP document: missing {exc}") from exc


def detexpr_to_json(e: DetExpr, sign: int = 1) -> dict:
    lam = [[field.signed(x) for x in row] for row in e.lam]
    xs = []
    for v in e.variables():
        mat = [[field.signed(x) for x in row] for row in e.coeff_matrix(v)]
        xs.append({"row": v.row, "col": v.col, "matrix": mat})
    return {"kind": "detexpr", "n": e.n, "m": e.m, "target": e.target, "sign": sign, "lambda": lam, "X": xs}


def detexpr_from_json(d: dict) -> tuple[DetExpr, int]:
    try:
        lam = d["lambda"]
        n = int(d["n"])
        if len(lam) != n or any(len(row) != n for row in lam):
            raise SchemaError("lambda is not n x n")
        mats = {VarId(int(x["row"]), int(x["col"])): x["matrix"] for x in d["X"]}
        e = DetExpr.from_parts(lam, mats, d.get("target", "generic"), d.get("m"))
        return e, int(d.get("sign", 1))
    except (KeyError, TypeError) as exc:
        raise SchemaError(f"malformed determinantal expression: missing {exc}") from exc


def _mat_to_json(mat: AffineMatrix) -> list:
    return [[form_to_json(f) for f in row] for row in mat.dense()]


def _mat_from_json(rows: list) -> AffineMatrix:
    return AffineMatrix.from_dense([[form_from_json(x) for x in row] for row in rows])


def himm_to_json(h: HimmExpr) -> dict:
    return {"kind": "himm", "m": h.m, "shapes": h.shapes, "mats": [_mat_to_json(a) for a in h.mats]}


def himm_from_json(d: dict) -> HimmExpr:
    try:
        mats = [_mat_from_json(rows) for rows in d["mats"]]
    except (KeyError, TypeError) as exc:
        raise SchemaError("malformed himm document") from exc
    h = HimmExpr(mats, d.get("m"))
    if "shapes" in d and list(d["shapes"]) != h.shapes:
        raise SchemaError(f"declared shapes {d['shapes']} do not match matrices {h.shapes}")
    return h


def imm_to_json(t: ImmExpr) -> dict:
    return {"kind": "imm", "n": t.n, "mats": [_mat_to_json(b) for b in t.mats]}


def imm_from_json(d: dict) -> ImmExpr:
    try:
        return ImmExpr([_mat_from_json(rows) for rows in d["mats"]])
    except (KeyError, TypeError) as exc:
        raise SchemaError("malformed imm document") from exc


def matrix_power_to_json(mp: MatrixPowerExpr) -> dict:
    return {"kind": "matrix_power", "n": mp.n, "power": mp.power, "matrix": _mat_to_json(mp.matrix)}


def matrix_power_from_json(d: dict) -> MatrixPowerExpr:
    try:
        return MatrixPowerExpr(_mat_from_json(d["matrix"]), int(d["power"]))
    except (KeyError, TypeError) as exc:
        raise SchemaError("malformed matrix_power document") from exc


def infer_kind(d: Any) -> str:
    if not isinstance(d, dict):
        raise SchemaError("document must be a JSON object")
    if "kind" in d:
        return d["kind"]
    if "edges" in d:
        return "abp"
    if "lambda" in d:
        return "detexpr"
    if "shapes" in d:
        return "himm"
    if "power" in d:
        return "matrix_power"
    if "mats" in d:
        return "imm"
    raise SchemaError("cannot tell what kind of document this is")


def to_json(obj, **extra) -> dict:
    if isinstance(obj, Abp):
        return abp_to_json(obj)
    if isinstance(obj, DetExpr):
        return detexpr_to_json(obj, **extra)
    if isinstance(obj, HimmExpr):
        return himm_to_json(obj)
    if isinstance(obj, ImmExpr):
        return imm_to_json(obj)
    if isinstance(obj, MatrixPowerExpr):
        return matrix_power_to_json(obj)
    raise TypeError(f"cannot serialize {type(obj).__name__}")


def from_json(d: dict):
    """Load any document; determinantal expressions come back as (expr, sign)."""
    kind = infer_kind(d)
    loaders = {
        "abp": abp_from_json,
        "detexpr": detexpr_from_json,
        "himm": himm_from_json,
        "imm": imm_from_json,
        "matrix_power": matrix_power_from_json,
    }
    if kind not in loaders:
        raise SchemaError(f"unknown document kind {kind!r}")
    return loaders[kind](d)


def dumps(doc: dict) -> str:
    return json.dumps(doc, separators=(",", ":")) + "\n"
