"""Named polycubes, each checked against its published invariants on load.

Coordinates live in ``data/*.json``.  They were read off figures, so every
entry passes through a gate that aborts on a mistranscription instead of
serving a wrong shape.
"""

from __future__ import annotations

import json
from functools import lru_cache
from importlib import resources

from .lattice import Coord, Polycube, build_polycube, is_polycube_tree, polycube_from_json
from .parity import parity_report
from .surface import polycube_skeleton

SHAPES = ("Cube", "Domino", "P6", "P6minus", "P222", "Pplus", "P14", "P44", "P44tower")

_FILES = {
    "Cube": "cube.json",
    "Domino": "domino.json",
    "P6": "p6.json",
    "P6minus": "p6minus.json",
    "P222": "p222.json",
    "Pplus": "pplus.json",
    "P14": "p14.json",
    "P44": "p44.json",
}

_ALIASES = {s.lower(): s for s in SHAPES}
_ALIASES.update({"p'6": "P6minus", "p6'": "P6minus", "p+": "Pplus", "tower": "P44tower"})


class UnknownShape(KeyError):
    pass


class InvariantViolation(AssertionError):
    def __init__(self, shape: str, check: str):
        super().__init__(f"{shape}: {check}")
        self.shape = shape
        self.check = check


def canonical_name(name: str) -> str:
    try:
        return _ALIASES[name.lower()]
    except KeyError:
        raise UnknownShape(name) from None


def _require(shape: str, ok: bool, check: str) -> None:
    if not ok:
        raise InvariantViolation(shape, check)


def _gate(p: Polycube) -> None:
    name = p.name or ""
    g = polycube_skeleton(p)
    report = parity_report(g)
    n = len(p.cubes)
    if name == "Cube":
        _require(name, n == 1, "one cube")
    elif name == "Domino":
        _require(name, n == 2, "two cubes")
    elif name == "P6":
        _require(name, not g.flats, "every vertex is a corner")
        _require(name, is_polycube_tree(p), "dual graph is a tree")
    elif name == "P6minus":
        _require(name, n == 6 and is_polycube_tree(p), "6-cube polycube tree")
        _require(name, (0, 0, -1) not in p.cubes and (0, 0, 1) in p.cubes,
                 "'+' layer at z=0 with one cube on top of its centre")
    elif name == "P222":
        _require(name, n == 8 and len(g) == 26, "8 cubes and 26 surface vertices")
        _require(name, (report.count0, report.count1) == (14, 12), "colour counts (14, 12)")
    elif name == "Pplus":
        _require(name, n == 6 and is_polycube_tree(p), "6-cube polycube tree")
    elif name == "P14":
        _require(name, n == 14, "14 cubes")
        _require(name, len(g.flats) == 3, "exactly three flat vertices")
        _require(name, report.imbalance == 2, "parity imbalance 2")
        x = g.by_point(p.annotations["x"])
        flats = {g.by_point(p.annotations[k]) for k in "abc"}
        _require(name, set(g.flats) == flats, "flat vertices are a, b, c")
        _require(name, not g.is_flat(x) and set(g.adj[x]) == flats,
                 "corner x is adjacent to exactly the three flats")
    elif name == "P44":
        _require(name, n == 44, "44 cubes")
        _require(name, not g.flats, "no flat vertices")
        _require(name, report.imbalance == 2, "parity imbalance 2")
    elif name.startswith("P44tower"):
        k = int(name.split("_")[1])
        _require(name, n == 44 + 6 * k, "44 + 6k cubes")
        _require(name, not g.flats, "every vertex is a corner")
        _require(name, report.imbalance == 2, "parity imbalance 2")


def _load(name: str) -> Polycube:
    text = resources.files("polyunzip.data").joinpath(_FILES[name]).read_text()
    return polycube_from_json(json.loads(text))


def highest_cube(cubes) -> Coord:
    top = max(c[2] for c in cubes)
    tops = [c for c in cubes if c[2] == top]
    if len(tops) != 1:
        raise ValueError(f"no unique highest cube: {tops}")
    return tops[0]


def tower_cubes(k: int) -> list[Coord]:
    """P44 with ``k`` copies of P6minus stacked, each glued by the bottom of
    its '+' centre onto the top face of the current highest cube."""
    if k < 1:
        raise ValueError("tower height must be >= 1")
    cubes = list(catalog("P44").cubes)
    cap = catalog("P6minus").cubes
    for _ in range(k):
        x, y, z = highest_cube(cubes)
        cubes.extend((x + dx, y + dy, z + 1 + dz) for dx, dy, dz in cap)
    return cubes


@lru_cache(maxsize=None)
def catalog(name: str, k: int | None = None) -> Polycube:
    """Return a named shape; ``k`` is the tower height for ``P44tower``."""
    name = canonical_name(name)
    if name == "P44tower":
        k = 1 if k is None else k
        p = build_polycube(tower_cubes(k), f"P44tower_{k}")
    else:
        p = _load(name)
        if p.name != name:
            raise InvariantViolation(name, f"data file is labelled {p.name!r}")
    _gate(p)
    return p
