"""Acceptance criteria, one test each.

Every test prints a single ``[PASS]`` / ``[FAIL]`` line.  Run directly
(``python3 tests/test_acceptance.py``) for just those lines, or through
pytest where the lines appear in the ``-v`` output.
"""

from __future__ import annotations

import json
import sys
import time

import pytest

from polyunzip.catalog import catalog
from polyunzip.cli import main
from polyunzip.hampath import ABSENT, BUDGET, FOUND, SearchConfig, zipper_path_search
from polyunzip.parity import color
from polyunzip.reproduce import lemma1, published_seeds
from polyunzip.surface import extract_surface, polycube_skeleton
from polyunzip.unfold import (boundary_length, edge_unfolding_search, full_turn_vertices,
                              net_census, overlap_check, zipper_unfolding_search)


def _cli_json(*argv) -> dict:
    from contextlib import redirect_stdout
    from io import StringIO
    buf = StringIO()
    with redirect_stdout(buf):
        main([*argv, "--json"])
    return json.loads(buf.getvalue())


def _net_ok(s, res) -> bool:
    n = res.layout
    return (res.status == FOUND and overlap_check(n)
            and boundary_length(s, n) == 2 * len(res.cut) and not full_turn_vertices(s, n))


def criterion_1():
    t = time.monotonic()
    reports = {name: _cli_json("info", "--shape", name) for name in ("P222", "P14", "P44")}
    bip = True
    for name in reports:
        g = polycube_skeleton(catalog(name))
        bip &= all(color(g.points[u]) != color(g.points[v]) for u, v in g.edge_list())
    dt = time.monotonic() - t
    p222 = reports["P222"]["parity"]
    ok = ((p222["count0"], p222["count1"]) == (14, 12)
          and all(r["parity"]["imbalance"] == 2 for r in reports.values()) and bip and dt < 1)
    return ok, f"parity counts P222={p222['count0']},{p222['count1']}; imbalances " + ", ".join(
        f"{k}={v['parity']['imbalance']}" for k, v in reports.items()) + f"; bipartite={bip}", dt


def criterion_2():
    t = time.monotonic()
    g44 = polycube_skeleton(catalog("P44"))
    p14 = catalog("P14")
    g14 = polycube_skeleton(p14)
    flats = set(g14.flats)
    x = [v for v in g14.corners if set(g14.adj[v]) == flats]
    p6 = _cli_json("info", "--shape", "P6")
    dt = time.monotonic() - t
    ok = (not g44.flats and len(flats) == 3 and len(x) == 1
          and g14.points[x[0]] == p14.annotations["x"]
          and p6["flat_vertices"] == 0 and p6["dual_tree"] and dt < 1)
    return ok, (f"P44 flats={len(g44.flats)}, P14 flats={len(flats)} with corner x adjacent only "
                f"to them={len(x) == 1}, P6 flats={p6['flat_vertices']} tree={p6['dual_tree']}"), dt


def criterion_3():
    t = time.monotonic()
    g = polycube_skeleton(catalog("P44"))
    r = zipper_path_search(g, SearchConfig(), "FlatSubsets")
    dt = time.monotonic() - t
    # optional exhaustive confirmation, allowed to run out of budget
    blind = zipper_path_search(g, SearchConfig(prune_parity=False, time_budget=5), "DirectDFS")
    ok = r.status == ABSENT and r.certificate is not None and dt < 1
    return ok, (f"P44 zipper search {r.status} with certificate imbalance "
                f"{r.certificate.report.imbalance if r.certificate else None}; "
                f"parity-blind DirectDFS: {blind.status}"), dt


def criterion_4():
    t = time.monotonic()
    g = polycube_skeleton(catalog("P14"))
    r = zipper_path_search(g, SearchConfig(threads=1), "FlatSubsets")
    d = zipper_path_search(g, SearchConfig(threads=1), "DirectDFS")
    dt = time.monotonic() - t
    ok = (r.status == ABSENT and len(r.cases) == 8
          and all(c["result"] == ABSENT for c in r.cases) and d.status == ABSENT and dt < 300)
    return ok, f"P14 FlatSubsets {r.status} over {len(r.cases)} subsets; DirectDFS {d.status}", dt


def criterion_5():
    t = time.monotonic()
    res = lemma1(SearchConfig(seed=0), trees=1000, max_cubes=30, cross_check_upto=6)
    dt = time.monotonic() - t
    ok = res.holds and dt < 120
    d = res.details
    return ok, (f"{d['trees']} trees (n<={d['max_cubes']}) all valid={not d['failures']}, "
                f"{d['cross_checked']} cross-checked, patterns {d['patterns']}"), dt


def criterion_6():
    t = time.monotonic()
    s = extract_surface(catalog("P6"))
    r = zipper_unfolding_search(s, SearchConfig(time_budget=60))
    dt = time.monotonic() - t
    ok = r.status == FOUND and _net_ok(s, r) and dt < 60
    return ok, f"P6 zipper net {r.status}: {r.detail}", dt


def _edge_net(name, budget):
    seeds = published_seeds()[name]
    t = time.monotonic()
    s = extract_surface(catalog(name))
    r = edge_unfolding_search(s, SearchConfig(seed=seeds["seed"], time_budget=budget),
                              steps_per_restart=seeds["steps_per_restart"])
    return s, r, time.monotonic() - t


def criterion_7():
    s14, r14, dt14 = _edge_net("P14", 600)
    s44, r44, dt44 = _edge_net("P44", 4 * 3600)
    ok = _net_ok(s14, r14) and dt14 < 600 and (r44.status == BUDGET or _net_ok(s44, r44))
    return ok, (f"P14 net {r14.status} ({len(r14.layout.placement) if r14.layout else 0} cells, "
                f"seed {r14.seed}); P44 net {r44.status} (seed {r44.seed}, "
                f"{r44.stats.get('steps')} steps)"), dt14 + dt44


def criterion_8():
    t = time.monotonic()
    base = set(polycube_skeleton(catalog("P44")).points.values())
    parts = []
    ok = True
    for k in (1, 2, 3):
        p = catalog("P44tower", k)
        g = polycube_skeleton(p)
        new_flats = [v for v in g.flats if g.points[v] not in base]
        r = zipper_path_search(g, SearchConfig())
        rep = _cli_json("info", "--shape", "P44tower", "--k", str(k))
        ok &= (len(p.cubes) == 44 + 6 * k and not new_flats
               and rep["parity"]["imbalance"] == 2
               and r.status == ABSENT and r.certificate is not None)
        parts.append(f"k={k}: {len(p.cubes)} cubes, imbalance {rep['parity']['imbalance']}, {r.status}")
    dt = time.monotonic() - t
    return ok and dt < 5, "; ".join(parts), dt


def criterion_9():
    t = time.monotonic()
    r = net_census(extract_surface(catalog("Cube")))
    dt = time.monotonic() - t
    ok = r.classes == 11 and r.all_nonoverlapping and r.boundary_ok and r.full_turn_ok and dt < 60
    return ok, (f"{r.trees} spanning cut trees -> {r.classes} nets, nonoverlapping="
                f"{r.all_nonoverlapping}, boundary={r.boundary_ok}, full turn={r.full_turn_ok}"), dt


CRITERIA = [criterion_1, criterion_2, criterion_3, criterion_4, criterion_5, criterion_6,
            criterion_7, criterion_8, criterion_9]


def _line(i, ok, msg, dt) -> str:
    return f"[{'PASS' if ok else 'FAIL'}] criterion {i}: {msg} ({dt:.2f}s)"


@pytest.mark.parametrize("i", range(1, 10))
def test_criterion(i, capsys):
    ok, msg, dt = CRITERIA[i - 1]()
    with capsys.disabled():
        print("\n" + _line(i, ok, msg, dt))
    assert ok, msg


if __name__ == "__main__":
    failed = 0
    for i, fn in enumerate(CRITERIA, 1):
        ok, msg, dt = fn()
        failed += not ok
        print(_line(i, ok, msg, dt), flush=True)
    sys.exit(1 if failed else 0)
