"""One checkable pipeline per result about the named shapes.

Each claim returns a :class:`ClaimResult`; ``holds`` is False when the
computation disagrees with the expected conclusion and ``budget`` is True
when a search ran out of budget before it could decide.
"""

from __future__ import annotations

import json
import random
import time
from dataclasses import dataclass, field
from importlib import resources

from .catalog import catalog
from .hampath import (ABSENT, BUDGET, FOUND, SearchConfig, find_hamiltonian_cycle,
                      find_hamiltonian_path, tree_hamiltonian_cycle, zipper_path_search)
from .lattice import build_polycube, random_polycube_tree
from .parity import color, hampath_obstruction, parity_report
from .surface import SkeletonGraph, delete_vertices, extract_surface, polycube_skeleton
from .unfold import (boundary_length, edge_unfolding_search, full_turn_vertices, overlap_check,
                     round_trip_ok, zipper_unfolding_search)
from .verify import is_hamiltonian_cycle

CLAIMS = ("lemma1", "lemma2", "lemma3-sanity", "lemma4", "lemma5", "theorem1", "theorem2",
          "p6-zipper-net", "p14-net", "p44-net", "tower")


class ClaimFailed(AssertionError):
    pass


@dataclass
class ClaimResult:
    claim: str
    holds: bool
    conclusion: str
    details: dict = field(default_factory=dict)
    budget: bool = False
    artifacts: dict = field(default_factory=dict)  # name -> (surface, layout), not serialised
    elapsed_ms: float = 0.0

    def to_dict(self) -> dict:
        status = "holds" if self.holds else ("budget" if self.budget else "fails")
        return {"claim": self.claim, "result": status, "conclusion": self.conclusion,
                "details": self.details}


def published_seeds() -> dict:
    """Seeds known to give nonoverlapping edge unfoldings."""
    text = resources.files("polyunzip.data").joinpath("nets.json").read_text()
    return json.loads(text)


# ---------------------------------------------------------------------------

def lemma1(cfg: SearchConfig, trees: int = 1000, max_cubes: int = 30,
           cross_check_upto: int = 6) -> ClaimResult:
    rng = random.Random(cfg.seed)
    bad, checked, patterns = [], 0, {}
    sizes = []
    for i in range(trees):
        n = rng.randint(1, max_cubes)
        p = random_polycube_tree(n, rng)
        g = polycube_skeleton(p)
        cyc = tree_hamiltonian_cycle(p, patterns)
        ok = is_hamiltonian_cycle(g, cyc.vertices) and len(cyc) == len(g) == 8 + 4 * (n - 1)
        if ok and n <= cross_check_upto:
            checked += 1
            ok = find_hamiltonian_cycle(g, cfg).status == FOUND
        if not ok:
            bad.append(sorted(p.cubes))
        sizes.append(n)
    p6 = catalog("P6")
    g6 = polycube_skeleton(p6)
    p6_ok = is_hamiltonian_cycle(g6, tree_hamiltonian_cycle(p6).vertices)
    return ClaimResult(
        "lemma1", not bad and p6_ok,
        "every polycube tree has a Hamiltonian cycle on its 1-skeleton",
        {"trees": trees, "max_cubes": max(sizes), "cross_checked": checked,
         "failures": bad[:5], "P6": p6_ok, "patterns": dict(sorted(patterns.items()))})


def lemma2(cfg: SearchConfig) -> ClaimResult:
    rng = random.Random(cfg.seed)
    shapes = [catalog(n) for n in ("Cube", "Domino", "P6", "P6minus", "P222", "Pplus",
                                   "P14", "P44")]
    shapes += [random_polycube_tree(rng.randint(1, 20), rng) for _ in range(50)]
    edges = 0
    bad = []
    for p in shapes:
        g = polycube_skeleton(p)
        for u, v in g.edge_list():
            edges += 1
            if color(g.points[u]) == color(g.points[v]):
                bad.append((p.name, g.points[u], g.points[v]))
    return ClaimResult("lemma2", not bad,
                       "the coordinate-sum colouring is a proper 2-colouring of every skeleton",
                       {"shapes": len(shapes), "edges_checked": edges, "violations": bad[:5]})


def small_graph_corpus() -> list[tuple[str, SkeletonGraph]]:
    """Skeleton graphs of at most 30 vertices: small polycubes and some of
    their induced subgraphs."""
    shapes = {
        "cube": [(0, 0, 0)],
        "domino": [(0, 0, 0), (1, 0, 0)],
        "I3": [(0, 0, 0), (1, 0, 0), (2, 0, 0)],
        "L3": [(0, 0, 0), (1, 0, 0), (1, 1, 0)],
        "T4": [(0, 0, 0), (1, 0, 0), (2, 0, 0), (1, 1, 0)],
        "S4": [(0, 0, 0), (1, 0, 0), (1, 1, 0), (2, 1, 0)],
        "O4": [(0, 0, 0), (1, 0, 0), (0, 1, 0), (1, 1, 0)],
        "tripod": [(0, 0, 0), (1, 0, 0), (0, 1, 0), (0, 0, 1)],
        "P222": [(x, y, z) for x in (0, 1) for y in (0, 1) for z in (0, 1)],
    }
    out = []
    for name, cubes in shapes.items():
        g = polycube_skeleton(build_polycube(cubes, name))
        out.append((name, g))
        if len(g) <= 16:
            vs = g.vertices
            # drop one or two vertices of the same colour
            for a in vs[:4]:
                out.append((f"{name}-{a}", delete_vertices(g, [a])))
                for b in vs:
                    if b > a and color(g.points[a]) == color(g.points[b]):
                        out.append((f"{name}-{a}-{b}", delete_vertices(g, [a, b])))
                        break
    return [(n, g) for n, g in out if 0 < len(g) <= 30]


def lemma3_sanity(cfg: SearchConfig) -> ClaimResult:
    """Certificate-backed answers agree with search that ignores parity."""
    blind = SearchConfig(**{**cfg.to_dict(), "prune_parity": False})
    rows, bad, budget = [], [], False
    for name, g in small_graph_corpus():
        cert = hampath_obstruction(g)
        res = find_hamiltonian_path(g, blind)
        rows.append({"graph": name, "vertices": len(g), "imbalance": parity_report(g).imbalance,
                     "certificate": cert is not None, "exhaustive": res.status})
        if res.status == BUDGET:
            budget = True
        elif cert is not None and res.status != ABSENT:
            bad.append(name)
    certified = sum(r["certificate"] for r in rows)
    return ClaimResult("lemma3-sanity", not bad and not budget and certified > 0,
                       "whenever the parity imbalance exceeds 1, exhaustive search finds no "
                       "Hamiltonian path", {"graphs": len(rows), "certified": certified,
                                            "disagreements": bad, "cases": rows},
                       budget=budget)


def lemma4(cfg: SearchConfig) -> ClaimResult:
    g222 = polycube_skeleton(catalog("P222"))
    r222 = parity_report(g222)
    g = polycube_skeleton(catalog("P44"))
    r = parity_report(g)
    ok = (r222.count0, r222.count1) == (14, 12) and r.imbalance == 2 and not g.flats
    return ClaimResult("lemma4", ok, "the skeleton of P44 has parity imbalance 2",
                       {"P222": r222.to_dict(), "P44": r.to_dict(), "P44_flats": len(g.flats)})


def lemma5(cfg: SearchConfig) -> ClaimResult:
    p = catalog("P14")
    g = polycube_skeleton(p)
    r = parity_report(g)
    a, b, c = (g.by_point(p.annotations[k]) for k in "abc")
    x = g.by_point(p.annotations["x"])
    g_a = delete_vertices(g, [a])
    g_ab = delete_vertices(g, [a, b])
    details = {
        "P14": r.to_dict(),
        "flats": [list(g.points[v]) for v in g.flats],
        "flat_colours": [color(g.points[v]) for v in g.flats],
        "G-a_imbalance": parity_report(g_a).imbalance,
        "G-ab_imbalance": parity_report(g_ab).imbalance,
        "x_degree_in_G-ab": g_ab.degree(x),
    }
    ok = (r.imbalance == 2 and set(g.flats) == {a, b, c} and details["G-a_imbalance"] == 3
          and details["G-ab_imbalance"] == 4 and details["x_degree_in_G-ab"] == 1)
    return ClaimResult("lemma5", ok, "the skeleton of P14 has parity imbalance 2", details)


def theorem1(cfg: SearchConfig) -> ClaimResult:
    g = polycube_skeleton(catalog("P44"))
    res = zipper_path_search(g, cfg, "FlatSubsets")
    ok = res.status == ABSENT and res.certificate is not None
    return ClaimResult("theorem1", ok, "P44 has no edge zipper unfolding",
                       {"zipper": res.to_dict(), "flats": len(g.flats)})


def theorem2(cfg: SearchConfig) -> ClaimResult:
    g = polycube_skeleton(catalog("P14"))
    subsets = zipper_path_search(g, cfg, "FlatSubsets")
    direct = zipper_path_search(g, cfg, "DirectDFS")
    budget = BUDGET in (subsets.status, direct.status)
    ok = (subsets.status == ABSENT and direct.status == ABSENT and len(subsets.cases) == 8)
    return ClaimResult("theorem2", ok, "P14 has no edge zipper unfolding",
                       {"FlatSubsets": subsets.to_dict(), "DirectDFS": direct.to_dict()},
                       budget=budget)


def _net_checks(s, layout, cut) -> dict:
    return {
        "faces": len(layout.placement),
        "nonoverlapping": overlap_check(layout),
        "boundary_length": boundary_length(s, layout),
        "cut_edges": len(cut),
        "full_turn_failures": len(full_turn_vertices(s, layout)),
        "round_trip": round_trip_ok(s, layout),
        "edge_kinds": layout.kind_counts(),
    }


def _net_ok(d: dict) -> bool:
    return (d["nonoverlapping"] and d["boundary_length"] == 2 * d["cut_edges"]
            and d["full_turn_failures"] == 0 and d["round_trip"])


def p6_zipper_net(cfg: SearchConfig) -> ClaimResult:
    s = extract_surface(catalog("P6"))
    res = zipper_unfolding_search(s, cfg)
    details = {"search": {k: v for k, v in res.to_dict().items() if k != "layout"}}
    ok = res.status == FOUND
    arts = {}
    if ok:
        details["net"] = _net_checks(s, res.layout, res.cut)
        ok = _net_ok(details["net"]) and len(res.cut) == len(res.sequence) - 1
        arts["P6"] = (s, res.layout)
    return ClaimResult("p6-zipper-net", ok, "P6 has an edge zipper unfolding", details,
                       budget=res.status == BUDGET, artifacts=arts)


def _edge_net(name: str, cfg: SearchConfig, claim: str) -> ClaimResult:
    s = extract_surface(catalog(name))
    res = edge_unfolding_search(s, cfg)
    details = {"search": {k: v for k, v in res.to_dict().items() if k != "layout"}}
    ok = res.status == FOUND
    arts = {}
    if ok:
        details["net"] = _net_checks(s, res.layout, res.cut)
        ok = _net_ok(details["net"])
        arts[name] = (s, res.layout)
    return ClaimResult(claim, ok, f"{name} has an edge unfolding", details,
                       budget=res.status == BUDGET, artifacts=arts)


def p14_net(cfg: SearchConfig) -> ClaimResult:
    return _edge_net("P14", cfg, "p14-net")


def p44_net(cfg: SearchConfig) -> ClaimResult:
    return _edge_net("P44", cfg, "p44-net")


def tower(cfg: SearchConfig, k: int = 1) -> ClaimResult:
    base = polycube_skeleton(catalog("P44"))
    p = catalog("P44tower", k)
    g = polycube_skeleton(p)
    old = set(base.points.values())
    new_flats = [g.points[v] for v in g.flats if g.points[v] not in old]
    r = parity_report(g)
    res = zipper_path_search(g, cfg, "FlatSubsets")
    details = {"k": k, "cubes": len(p.cubes), "vertices": len(g),
               "new_vertices": sum(pt not in old for pt in g.points.values()),
               "new_flat_vertices": len(new_flats), "parity": r.to_dict(),
               "zipper": res.to_dict()}
    ok = (len(p.cubes) == 44 + 6 * k and not new_flats and r.imbalance == 2
          and res.status == ABSENT and res.certificate is not None)
    return ClaimResult("tower", ok, f"the height-{k} tower has no edge zipper unfolding",
                       details)


def run_claim(claim: str, cfg: SearchConfig, k: int = 1) -> ClaimResult:
    fn = {
        "lemma1": lemma1, "lemma2": lemma2, "lemma3-sanity": lemma3_sanity, "lemma4": lemma4,
        "lemma5": lemma5, "theorem1": theorem1, "theorem2": theorem2,
        "p6-zipper-net": p6_zipper_net, "p14-net": p14_net, "p44-net": p44_net,
    }
    t0 = time.monotonic()
    if claim == "tower":
        res = tower(cfg, k)
    elif claim in fn:
        res = fn[claim](cfg)
    else:
        raise ValueError(f"unknown claim {claim!r}; choose from {', '.join(CLAIMS)}")
    res.elapsed_ms = round((time.monotonic() - t0) * 1000, 3)
    return res
