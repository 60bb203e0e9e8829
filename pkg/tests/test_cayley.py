import random

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from ctexpand.cayley import (
    CapExceeded,
    EnumError,
    GroupTable,
    build_cayley,
    enumerate_group,
    export,
    graph_from_neighbors,
    import_graph,
    load_table,
    membership,
    save_table,
)
from ctexpand.ff import base_field
from ctexpand import pipeline
from ctexpand.specialize import FMat, classical_order, finite_transvection


def sl2_2_gens():
    F = base_field(2)
    x = FMat(F, [[0, 1], [1, 0]])
    y = FMat(F, [[0, 1], [1, 1]])
    return [x, y, y.inverse()], ("x", "y", "y^-1")


def test_sl2_2_order_and_graph():
    gens, labels = sl2_2_gens()
    table = enumerate_group(gens)
    assert table.order == 6
    g = build_cayley(table, gens, labels)
    assert g.N == 6 and g.k == 3
    assert g.is_regular() and g.is_symmetric() and g.is_connected() and not g.has_self_loops()


def test_c2_gives_k2():
    F = base_field(2)
    x = FMat(F, [[0, 1], [1, 0]])
    table = enumerate_group([x])
    g = build_cayley(table, [x], ["x"])
    assert g.N == 2 and g.k == 1
    assert export(g, "edge-list") == b"0 1\n"


def test_identity_generator_rejected():
    F = base_field(2)
    e = FMat.identity(F, 2)
    with pytest.raises(EnumError):
        enumerate_group([e])
    assert enumerate_group([e], allow_identity=True).order == 1


def test_asymmetric_generators_rejected():
    F = base_field(3)
    y = FMat(F, [[1, 1], [0, 1]])  # order 3, inverse not in the set
    table = enumerate_group([y])
    with pytest.raises(EnumError):
        build_cayley(table, [y])


def test_cap_exceeded():
    gens, _ = sl2_2_gens()
    with pytest.raises(CapExceeded) as exc:
        enumerate_group(gens, limit=4)
    assert exc.value.limit == 4


def test_triangle_export():
    g = graph_from_neighbors([[1, 2], [2, 0], [0, 1]])
    assert export(g, "edge-list") == b"0 1\n0 2\n1 2\n"
    dot = export(g, "dot").decode()
    assert dot.startswith("graph cayley {") and "0 -- 1" in dot


def test_unknown_format():
    g = graph_from_neighbors([[1], [0]])
    with pytest.raises(EnumError):
        export(g, "xml")


def test_membership_identity_and_nonmember(su4_run):
    _, spec, table, _, _ = su4_run["full"]
    assert membership(table, FMat.identity(spec.ctx, 4)) == 0
    d = np.eye(4, dtype=np.int64)
    d[0, 0] = spec.a
    assert membership(table, FMat(spec.ctx, d)) is None


def test_basis_transvections_are_members(su4_run):
    _, spec, table, _, _ = su4_run["det1"]
    F = spec.ctx
    lams = [x for x in range(1, F.order) if F.add(spec.conj(x), F.mul(spec.a, x)) == 0]
    assert len(lams) == 1
    for v in range(4):
        for lam in lams:
            assert membership(table, finite_transvection(spec, v, lam)) is not None


def test_su4_orders(su4_run):
    full = su4_run["full"][2]
    det1 = su4_run["det1"][2]
    assert full.order == 77760
    assert det1.order == 25920 == classical_order("SU", 4, 2)
    assert classical_order("GU", 4, 2) % full.order == 0


def test_su4_graph_shape(su4_run):
    for group in ("full", "det1"):
        g = su4_run[group][3]
        assert g.k == 5 and g.is_regular() and g.is_symmetric() and g.is_connected()
        assert g.coincident == ()


def test_layer_growth_bound(su4_run):
    for group in ("full", "det1"):
        table, g = su4_run[group][2], su4_run[group][3]
        sizes = table.layer_sizes()
        assert sizes[0] == 1 and sizes[1] == g.k
        for d in range(1, len(sizes) - 1):
            assert sizes[d + 1] <= (g.k - 1) * sizes[d]


def test_vertex_transitivity_witness(su4_run):
    _, spec, table, graph, imgs = su4_run["det1"]
    rng = random.Random(0)
    ident_nbrs = sorted(graph.neighbors[0].tolist())
    for v in rng.sample(range(table.order), 20):
        V = table.element(v)
        mapped = sorted(membership(table, V @ table.element(u)) for u in ident_nbrs)
        assert mapped == graph.sorted_neighbors(v)


def test_table_bytes_round_trip(su4_run, tmp_path):
    table = su4_run["det1"][2]
    again = GroupTable.from_bytes(table.to_bytes())
    assert again == table
    path = tmp_path / "t.grp"
    save_table(path, table)
    assert load_table(path) == table


def test_graph_binary_round_trip(su4_run):
    g = su4_run["full"][3]
    assert import_graph(export(g, "binary-cache")) == g


@settings(max_examples=15, deadline=None)
@given(st.integers(0, 2**31 - 1))
def test_round_trip_random_groups(seed):
    rng = np.random.default_rng(seed)
    F = base_field(3)
    while True:
        m = rng.integers(0, 3, size=(2, 2))
        g = FMat(F, m)
        if g.det() != 0 and not g.is_identity():
            break
    gens = [g, g.inverse()]
    table = enumerate_group(gens)
    graph = build_cayley(table, gens, ["g", "G"])
    assert import_graph(export(graph, "binary-cache")) == graph
    assert GroupTable.from_bytes(table.to_bytes()) == table


def test_thread_count_does_not_change_table():
    cfg = pipeline.RunConfig(group="det1", cache=False)
    _, _, imgs = pipeline._group_gens(cfg)
    a = enumerate_group(imgs, workers=1)
    b = enumerate_group(imgs, workers=3)
    assert a.to_bytes() == b.to_bytes()


def test_bad_magic():
    with pytest.raises(EnumError):
        GroupTable.from_bytes(b"XXXX" + bytes(40))
