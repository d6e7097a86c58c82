import random

import pytest
from hypothesis import given, settings, strategies as st

from polyunzip.catalog import catalog
from polyunzip.lattice import random_polycube_tree
from polyunzip.parity import (NotBipartite, color, hampath_obstruction, parity_report)
from polyunzip.surface import SkeletonGraph, polycube_skeleton


def test_color():
    assert color((0, 0, 0)) == 0 and color((1, 0, 0)) == 1 and color((-1, 2, 4)) == 1


@pytest.mark.parametrize("name, counts", [
    ("Cube", (4, 4)), ("P222", (14, 12)), ("P14", (26, 24)), ("P44", (86, 84)),
])
def test_counts(name, counts):
    r = parity_report(polycube_skeleton(catalog(name)))
    assert (r.count0, r.count1) == counts


def test_obstructions():
    assert hampath_obstruction(polycube_skeleton(catalog("Cube"))) is None
    cert = hampath_obstruction(polycube_skeleton(catalog("P44")))
    assert cert is not None and cert.report.imbalance == 2
    d = cert.to_dict()
    assert d["kind"] == "ParityImbalance" and "alternates" in d["justification"]


def test_not_bipartite():
    g = SkeletonGraph({0: (0, 0, 0), 1: (1, 1, 0)}, {0: 3, 1: 3},
                      {0: frozenset([1]), 1: frozenset([0])})
    with pytest.raises(NotBipartite):
        parity_report(g)


@settings(max_examples=40, deadline=None)
@given(st.integers(1, 20), st.integers(0, 10 ** 6))
def test_every_edge_joins_two_colours(n, seed):
    g = polycube_skeleton(random_polycube_tree(n, random.Random(seed)))
    for u, v in g.edge_list():
        assert color(g.points[u]) != color(g.points[v])


@settings(max_examples=30, deadline=None)
@given(st.integers(1, 15), st.integers(0, 10 ** 6),
       st.tuples(st.integers(-5, 5), st.integers(-5, 5), st.integers(-5, 5)))
def test_translation(n, seed, offset):
    p = random_polycube_tree(n, random.Random(seed))
    r = parity_report(polycube_skeleton(p))
    t = parity_report(polycube_skeleton(p.translated(offset)))
    if sum(offset) % 2 == 0:
        assert (t.count0, t.count1) == (r.count0, r.count1)
    else:
        assert (t.count0, t.count1) == (r.count1, r.count0)
    assert t.imbalance == r.imbalance
