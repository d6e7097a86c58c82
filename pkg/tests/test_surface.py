import random

import pytest
from hypothesis import given, settings, strategies as st

from polyunzip.catalog import catalog
from polyunzip.lattice import random_polycube_tree, sub
from polyunzip.surface import (UnknownVertex, VertexClass, delete_vertices, extract_surface,
                               polycube_skeleton, skeleton_graph)


def _cross(a, b):
    return (a[1] * b[2] - a[2] * b[1], a[2] * b[0] - a[0] * b[2], a[0] * b[1] - a[1] * b[0])


def test_cube_counts():
    s = extract_surface(catalog("Cube"))
    assert (len(s.vertices), len(s.edges), len(s.faces)) == (8, 12, 6)
    g = skeleton_graph(s)
    assert all(g.vclass(v) == VertexClass.CORNER and g.degree(v) == 3 for v in g.vertices)


def test_domino_counts_and_flats():
    s = extract_surface(catalog("Domino"))
    assert (len(s.vertices), len(s.edges), len(s.faces)) == (12, 20, 10)
    g = skeleton_graph(s)
    assert len(g.flats) == 4
    assert all(g.points[v][0] == 1 for v in g.flats)


def test_faces_are_counter_clockwise_from_outside():
    s = extract_surface(catalog("P14"))
    for f in s.faces:
        pts = [s.vertices[v].point for v in f.vertices]
        n = _cross(sub(pts[1], pts[0]), sub(pts[2], pts[1]))
        assert n == f.normal


def test_edges_bound_two_faces_and_follow_face_order():
    s = extract_surface(catalog("P44"))
    for f in s.faces:
        for i, e in enumerate(f.edges):
            edge = s.edges[e]
            assert {edge.u, edge.v} == {f.vertices[i], f.vertices[(i + 1) % 4]}
            assert f.id in edge.faces


def test_angle_equals_degree():
    g = polycube_skeleton(catalog("P14"))
    for v in g.vertices:
        assert g.angle[v] == g.degree(v)
        assert g.degree(v) in (3, 4, 5, 6)


def test_edge_cube_counts():
    s = extract_surface(catalog("Domino"))
    counts = sorted(s.edge_cube_count(e.id) for e in s.edges)
    # 8 convex end edges + 8 convex side edges, 4 coplanar middle edges
    assert counts == [1] * 16 + [2] * 4
    s = extract_surface(catalog("P6"))
    assert 3 in {s.edge_cube_count(e.id) for e in s.edges}


def test_p14_flats_and_x():
    p = catalog("P14")
    g = polycube_skeleton(p)
    assert len(g.flats) == 3
    x = g.by_point(p.annotations["x"])
    assert set(g.adj[x]) == set(g.flats)


def test_p44_and_p6_have_no_flats():
    assert not polycube_skeleton(catalog("P44")).flats
    assert not polycube_skeleton(catalog("P6")).flats


def test_delete_vertices():
    g = polycube_skeleton(catalog("P14"))
    a = g.flats[0]
    h = delete_vertices(g, [a])
    assert len(h) == len(g) - 1
    assert all(a not in h.adj[v] for v in h.vertices)
    assert h.angle == {v: g.angle[v] for v in h.vertices}
    with pytest.raises(UnknownVertex):
        delete_vertices(g, [10 ** 6])
    with pytest.raises(UnknownVertex):
        g.by_point((99, 99, 99))


@settings(max_examples=30, deadline=None)
@given(st.integers(1, 15), st.integers(0, 10 ** 6), st.data())
def test_delete_vertices_sizes(n, seed, data):
    g = polycube_skeleton(random_polycube_tree(n, random.Random(seed)))
    drop = data.draw(st.sets(st.sampled_from(g.vertices), max_size=5))
    h = delete_vertices(g, drop)
    assert len(h) == len(g) - len(drop)
    assert len(h.edge_list()) == len(g.edge_list()) - len(
        {e for e in g.edge_list() if e[0] in drop or e[1] in drop})


def test_dump_edge_list(tmp_path):
    g = polycube_skeleton(catalog("Domino"))
    path = tmp_path / "domino.edges"
    g.dump_edge_list(path)
    lines = path.read_text().splitlines()
    assert len(lines) == 20
    classes = (tmp_path / "domino.edges.classes").read_text().splitlines()
    assert len(classes) == 12
    assert sum(line.endswith("flat") for line in classes) == 4
