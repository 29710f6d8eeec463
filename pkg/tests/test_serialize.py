import json

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from abpkit.abp import homogenize
from abpkit.detexpr import abp_to_detexpr
from abpkit.generators import random_abp, random_layered_abp
from abpkit.imm import grenet_dlabp, grenet_perm, labp_to_imm, to_matrix_power
from abpkit.mahajan_vinay import build_mv_abp
from abpkit.serialize import SchemaError, dumps, from_json, infer_kind, to_json


def round_trip(doc):
    text = dumps(doc)
    obj = from_json(json.loads(text))
    if isinstance(obj, tuple):
        again = to_json(obj[0], sign=obj[1])
    else:
        again = to_json(obj)
    return text, dumps(again)


def objects():
    mv = build_mv_abp(3)
    return [
        mv,
        grenet_dlabp(3),
        grenet_perm(4),
        labp_to_imm(mv),
        to_matrix_power(grenet_dlabp(3)),
        homogenize(random_abp(3, 12, 4, 2), 2),
    ]


@pytest.mark.parametrize("obj", objects(), ids=lambda o: type(o).__name__)
def test_round_trip_is_byte_stable(obj):
    text, again = round_trip(to_json(obj))
    assert text == again


def test_detexpr_round_trip_keeps_sign():
    expr, sign = abp_to_detexpr(build_mv_abp(4), "det", 4)
    doc = to_json(expr, sign=sign)
    back, back_sign = from_json(json.loads(dumps(doc)))
    assert back == expr and back_sign == sign == -1
    assert doc["target"] == "det" and doc["n"] == 21


@settings(max_examples=30, deadline=None)
@given(st.integers(0, 2**32))
def test_random_abp_round_trip(seed):
    for g in (random_abp(seed, 15, 5, 2), random_layered_abp(seed, 20, 2, linear=False)):
        back = from_json(json.loads(dumps(to_json(g))))
        assert back.edges == g.edges and back.vertices == g.vertices
        assert back.source == g.source and back.sink == g.sink


def test_abp_document_shape():
    doc = to_json(build_mv_abp(2))
    assert list(doc) == ["kind", "m", "vertices", "source", "sink", "edges"]
    assert doc["edges"][0]["label"]["terms"][0].keys() == {"row", "col", "coeff"}


def test_kind_inference_without_tag():
    doc = to_json(grenet_perm(2))
    del doc["kind"]
    assert infer_kind(doc) == "himm"


@pytest.mark.parametrize(
    "doc",
    [
        [],
        {"kind": "nope"},
        {"kind": "abp", "vertices": ["s"]},
        {"kind": "detexpr", "n": 2, "lambda": [[0]], "X": []},
        {"kind": "himm", "mats": [[[{"const": 0, "terms": [{"row": 1}]}]]]},
        {"unrelated": 1},
    ],
)
def test_schema_errors(doc):
    with pytest.raises(SchemaError):
        from_json(doc)


def test_himm_declared_shapes_checked():
    doc = to_json(grenet_perm(3))
    doc["shapes"] = [1, 2, 3]
    with pytest.raises(SchemaError):
        from_json(doc)
