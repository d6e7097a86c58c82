import json
import random
from itertools import combinations

import pytest
from hypothesis import given, settings, strategies as st

from polyunzip.catalog import InvariantViolation, UnknownShape, catalog, tower_cubes
from polyunzip.lattice import (Disconnected, DuplicateCube, EmptyPolycube, NonManifoldEdge,
                               NonManifoldVertex, NonZeroGenus, PolycubeFormatError,
                               build_polycube, dual_graph, is_polycube_tree, load_polycube,
                               polycube_from_json, random_polycube_tree, save_polycube)
from polyunzip.surface import extract_surface, polycube_skeleton


def test_single_cube():
    p = build_polycube([(0, 0, 0)])
    assert len(p) == 1 and is_polycube_tree(p)


@pytest.mark.parametrize("cubes, error", [
    ([], EmptyPolycube),
    ([(0, 0, 0), (0, 0, 0)], DuplicateCube),
    ([(0, 0, 0), (3, 0, 0)], Disconnected),
    ([(0, 0, 0), (1, 1, 0)], NonManifoldEdge),
    ([(0, 0, 0), (1, 1, 1)], NonManifoldVertex),
    ([(x, y, 0) for x in range(3) for y in range(3) if (x, y) != (1, 1)], NonZeroGenus),
    ([(0, 0)], PolycubeFormatError),
    ([(0.5, 0, 0)], PolycubeFormatError),
    ([(True, 0, 0)], PolycubeFormatError),
])
def test_rejections(cubes, error):
    with pytest.raises(error):
        build_polycube(cubes)


def test_vertex_pinch_in_connected_shape():
    loop = [(0, 0, 0), (-1, 0, 0), (-1, 0, 1), (-1, 0, 2), (-1, 0, 3), (0, 0, 3), (1, 0, 3),
            (1, 1, 3), (1, 1, 2)]
    build_polycube(loop)
    with pytest.raises(NonManifoldVertex):
        build_polycube(loop + [(1, 1, 1)])


def test_hollow_shell_is_rejected():
    shell = [(x, y, z) for x in range(3) for y in range(3) for z in range(3) if (x, y, z) != (1, 1, 1)]
    with pytest.raises(NonZeroGenus):
        build_polycube(shell)


def test_error_kinds_are_structured():
    with pytest.raises(NonManifoldEdge) as info:
        build_polycube([(0, 0, 0), (1, 1, 0)])
    assert info.value.to_dict()["error"] == "NonManifoldEdge"


def test_dual_graph_domino_and_plus():
    d = dual_graph(catalog("Domino"))
    assert len(d.nodes) == 2 and d.edges == ((0, 1),)
    assert is_polycube_tree(catalog("P6"))
    assert not is_polycube_tree(catalog("P222"))


def _brute_dual_edges(cubes):
    return {frozenset((a, b)) for a, b in combinations(cubes, 2)
            if sum(abs(x - y) for x, y in zip(a, b)) == 1}


@settings(max_examples=40, deadline=None)
@given(st.integers(1, 20), st.integers(0, 10 ** 6))
def test_dual_graph_matches_brute_force(n, seed):
    p = random_polycube_tree(n, random.Random(seed))
    d = dual_graph(p)
    got = {frozenset((d.nodes[i], d.nodes[j])) for i, j in d.edges}
    assert got == _brute_dual_edges(p.cubes)
    assert is_polycube_tree(p) and len(d.edges) == n - 1


@settings(max_examples=40, deadline=None)
@given(st.integers(1, 25), st.integers(0, 10 ** 6))
def test_euler_characteristic_two(n, seed):
    s = extract_surface(random_polycube_tree(n, random.Random(seed)))
    assert len(s.vertices) - len(s.edges) + len(s.faces) == 2


def test_json_round_trip(tmp_path):
    p = catalog("P14")
    path = tmp_path / "p.json"
    save_polycube(p, path)
    q = load_polycube(path)
    assert q.cubes == p.cubes and q.name == "P14"


def test_json_format_errors(tmp_path):
    bad = tmp_path / "bad.json"
    bad.write_text("{not json")
    with pytest.raises(PolycubeFormatError):
        load_polycube(bad)
    with pytest.raises(PolycubeFormatError):
        polycube_from_json({"cubes": "nope"})
    with pytest.raises(PolycubeFormatError):
        polycube_from_json({"cubes": [[0, 0, 0]], "annotations": {"x": [0, 0]}})


@pytest.mark.parametrize("name, cubes, vertices", [
    ("Cube", 1, 8), ("Domino", 2, 12), ("P6", 7, 32), ("P222", 8, 26),
    ("P14", 14, 50), ("P44", 44, 170),
])
def test_catalog_sizes(name, cubes, vertices):
    p = catalog(name)
    assert len(p.cubes) == cubes
    assert len(polycube_skeleton(p)) == vertices


def test_catalog_faces_match_dual_edges():
    for name in ("P14", "P44", "P222"):
        p = catalog(name)
        faces = len(extract_surface(p).faces)
        assert faces == 6 * len(p.cubes) - 2 * len(dual_graph(p).edges)
    assert len(extract_surface(catalog("P14")).faces) == 48


def test_catalog_aliases_and_unknown():
    assert catalog("p+").name == "Pplus"
    assert catalog("p'6").name == "P6minus"
    with pytest.raises(UnknownShape):
        catalog("P99")


def test_towers():
    for k in (1, 2, 3):
        assert len(catalog("P44tower", k).cubes) == 44 + 6 * k
    with pytest.raises(ValueError):
        tower_cubes(0)


def test_gate_catches_a_bad_transcription(monkeypatch):
    import polyunzip.catalog as cat
    good = cat._load("P14")
    moved = build_polycube([c for c in good.cubes if c != (2, 1, 0)] + [(2, 1, 1)], "P14",
                           good.annotations)
    with pytest.raises(InvariantViolation):
        cat._gate(moved)


def test_random_tree_is_deterministic():
    a = random_polycube_tree(15, random.Random(3))
    b = random_polycube_tree(15, random.Random(3))
    assert a.cubes == b.cubes


def test_data_files_are_plain_json():
    from importlib import resources
    for f in resources.files("polyunzip.data").iterdir():
        if f.name.endswith(".json"):
            json.loads(f.read_text())
