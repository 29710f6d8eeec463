import pytest
from _support import leibniz

from abpkit.mahajan_vinay import build_mv_abp, mv_layer, mv_layer_count, mv_size, mv_vertices
from abpkit.oracles import det_reference
from abpkit.pit import pit_equal
from abpkit.poly import VarId


@pytest.mark.parametrize("m, size", [(1, 2), (2, 4), (3, 10), (4, 22), (5, 42)])
def test_mv_size(m, size):
    assert mv_size(m) == size == build_mv_abp(m).size


def test_mv_layer_count_example():
    assert mv_layer_count(4, 2) == 7 == len(mv_layer(4, 2))


@pytest.mark.parametrize("m", range(2, 11))
def test_layer_counts_by_enumeration(m):
    layers = build_mv_abp(m).layer_lists()
    assert len(layers) == m + 1
    assert len(layers[0]) == len(layers[m]) == 1
    for i in range(1, m):
        enumerated = 1 + sum(min(i, u) for u in range(2, m + 1))
        assert len(layers[i]) == enumerated == i * (i + 1) // 2 + i * (m - i)


def test_vertex_set_m3():
    verts = set(mv_vertices(3))
    expected = {(1, 1, 0), (1, 1, 3), (2, 2, 1), (3, 3, 2)}
    expected |= {(h, u, i) for i in (1, 2) for u in (2, 3) for h in range(1, min(i, u) + 1)}
    assert verts == expected


def test_mv_m3_labels():
    g = build_mv_abp(3)
    # (1,2,1) -> (1,3,2) labelled x^2_3, (1,2,1) -> (2,2,2) labelled -x^2_1
    assert g.edges[((1, 2, 1), (1, 3, 2))].items() == ((VarId(2, 3), 1),)
    assert g.edges[((1, 2, 1), (2, 2, 2))].coeff(VarId(2, 1)) == -1 % (2**61 - 1)


def test_mv_sink_sign_even_m():
    g = build_mv_abp(2)
    into_sink = [f for (u, v), f in g.edges.items() if v == g.sink]
    assert all(c == 2**61 - 2 for f in into_sink for _, c in f.items())


@pytest.mark.parametrize("m", range(2, 9))
def test_mv_pit(m):
    assert pit_equal(build_mv_abp(m), lambda a: det_reference(m, a), m, m).equal


@pytest.mark.parametrize("m", range(1, 5))
def test_mv_symbolic(m):
    assert build_mv_abp(m).polynomial() == leibniz(m, True)


def test_mv_rejects_m0():
    with pytest.raises(ValueError):
        build_mv_abp(0)
