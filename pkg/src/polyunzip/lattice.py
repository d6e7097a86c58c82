"""Integer-lattice polycube model.

A cube is identified by its minimum corner; surface vertices are lattice
points.  Everything here is exact integer arithmetic.
"""

from __future__ import annotations

import json
from collections import defaultdict, deque
from dataclasses import dataclass, field
from functools import lru_cache
from itertools import product
from pathlib import Path
from typing import Iterable

Coord = tuple[int, int, int]

AXES = ((1, 0, 0), (0, 1, 0), (0, 0, 1))
DIRECTIONS = tuple((axis, sign) for axis in range(3) for sign in (-1, 1))


class PolycubeError(ValueError):
    """Base class for structured polycube validation failures."""

    kind = "PolycubeError"

    def to_dict(self) -> dict:
        return {"error": self.kind, "detail": str(self)}


class EmptyPolycube(PolycubeError):
    kind = "Empty"


class DuplicateCube(PolycubeError):
    kind = "Duplicate"

    def __init__(self, coord: Coord):
        super().__init__(f"duplicate cube {coord}")
        self.coord = coord


class Disconnected(PolycubeError):
    kind = "Disconnected"

    def __init__(self, components: int):
        super().__init__(f"dual graph has {components} components")
        self.components = components


class NonManifoldEdge(PolycubeError):
    kind = "NonManifoldEdge"

    def __init__(self, edge: tuple[Coord, Coord]):
        super().__init__(f"edge {edge[0]}-{edge[1]} is shared by two diagonal cubes only")
        self.edge = edge


class NonManifoldVertex(PolycubeError):
    kind = "NonManifoldVertex"

    def __init__(self, vertex: Coord):
        super().__init__(f"faces around vertex {vertex} do not form a single fan")
        self.vertex = vertex


class NonZeroGenus(PolycubeError):
    kind = "NonZeroGenus"

    def __init__(self, euler: int):
        super().__init__(f"surface Euler characteristic is {euler}, expected 2")
        self.euler = euler


class PolycubeFormatError(PolycubeError):
    """Malformed JSON input (as opposed to a geometrically invalid polycube)."""

    kind = "FormatError"


def add(a: Coord, b: Coord) -> Coord:
    return (a[0] + b[0], a[1] + b[1], a[2] + b[2])


def sub(a: Coord, b: Coord) -> Coord:
    return (a[0] - b[0], a[1] - b[1], a[2] - b[2])


def unit(axis: int, sign: int = 1) -> Coord:
    v = [0, 0, 0]
    v[axis] = sign
    return (v[0], v[1], v[2])


def face_corners(cube: Coord, axis: int, sign: int) -> tuple[Coord, Coord, Coord, Coord]:
    """Corners of one cube face, counter-clockwise seen from outside."""
    b, c = (axis + 1) % 3, (axis + 2) % 3
    base = cube if sign < 0 else add(cube, unit(axis))
    p0 = base
    p1 = add(base, unit(b))
    p2 = add(p1, unit(c))
    p3 = add(base, unit(c))
    # e_b x e_c = +e_axis, so (p0, p1, p2, p3) winds CCW about +axis.
    if sign > 0:
        return (p0, p1, p2, p3)
    return (p0, p3, p2, p1)


@dataclass(frozen=True)
class Polycube:
    """A validated polycube.  Build through :func:`build_polycube`."""

    cubes: frozenset[Coord]
    name: str | None = None
    annotations: dict[str, Coord] = field(default_factory=dict, compare=False, hash=False)

    def __len__(self) -> int:
        return len(self.cubes)

    def sorted_cubes(self) -> list[Coord]:
        return sorted(self.cubes)

    def translated(self, offset: Coord) -> "Polycube":
        return Polycube(
            frozenset(add(c, offset) for c in self.cubes),
            self.name,
            {k: add(v, offset) for k, v in self.annotations.items()},
        )

    def to_json(self) -> dict:
        return {"name": self.name or "", "cubes": [list(c) for c in self.sorted_cubes()]}


@dataclass(frozen=True)
class DualGraph:
    nodes: tuple[Coord, ...]
    edges: tuple[tuple[int, int], ...]

    def adjacency(self) -> list[list[int]]:
        adj: list[list[int]] = [[] for _ in self.nodes]
        for i, j in self.edges:
            adj[i].append(j)
            adj[j].append(i)
        return adj


def _components(cubes: set[Coord]) -> int:
    seen: set[Coord] = set()
    count = 0
    for start in cubes:
        if start in seen:
            continue
        count += 1
        seen.add(start)
        queue = deque([start])
        while queue:
            c = queue.popleft()
            for axis, sign in DIRECTIONS:
                n = add(c, unit(axis, sign))
                if n in cubes and n not in seen:
                    seen.add(n)
                    queue.append(n)
    return count


def boundary_faces(cubes: Iterable[Coord]) -> list[tuple[Coord, int, int]]:
    """(cube, axis, sign) for every cube face with no neighbour across it."""
    cubeset = set(cubes)
    return [
        (c, axis, sign)
        for c in sorted(cubeset)
        for axis, sign in DIRECTIONS
        if add(c, unit(axis, sign)) not in cubeset
    ]


_OCTANTS = tuple(product((-1, 0), repeat=3))


def _occupancy(cubes: set[Coord], v: Coord) -> int:
    """Bit i set iff the cube at ``v + _OCTANTS[i]`` is present."""
    x, y, z = v
    mask = 0
    for i, (dx, dy, dz) in enumerate(_OCTANTS):
        if (x + dx, y + dy, z + dz) in cubes:
            mask |= 1 << i
    return mask


@lru_cache(maxsize=256)
def fan_is_disk(mask: int) -> bool:
    """Do the boundary faces around a vertex with this octant occupancy form
    one closed fan?  Faces are linked through the edges they share at the
    vertex; a disk neighbourhood means every edge joins exactly two faces and
    the links form a single cycle."""
    cubes = {_OCTANTS[i] for i in range(8) if mask >> i & 1}
    origin = (0, 0, 0)
    links: dict[Coord, list[Coord]] = defaultdict(list)
    for c in cubes:
        for axis, sign in DIRECTIONS:
            if add(c, unit(axis, sign)) in cubes:
                continue
            quad = face_corners(c, axis, sign)
            if origin not in quad:
                continue
            i = quad.index(origin)
            a, b = quad[i - 1], quad[(i + 1) % 4]
            links[a].append(b)
            links[b].append(a)
    if not links:
        return True
    if any(len(n) != 2 for n in links.values()):
        return False
    start = next(iter(links))
    seen = {start}
    stack = [start]
    while stack:
        for w in links[stack.pop()]:
            if w not in seen:
                seen.add(w)
                stack.append(w)
    return len(seen) == len(links)


def _cube_edges(c: Coord):
    for axis in range(3):
        s, t = (axis + 1) % 3, (axis + 2) % 3
        for ds in (0, 1):
            for dt in (0, 1):
                a = list(c)
                a[s] += ds
                a[t] += dt
                lo = tuple(a)
                yield axis, lo, add(lo, unit(axis))  # type: ignore[arg-type]


def _edge_ring(cubes: set[Coord], axis: int, lo: Coord) -> tuple[bool, bool, bool, bool]:
    """Occupancy of the four cubes around an edge, in cyclic order."""
    s, t = (axis + 1) % 3, (axis + 2) % 3
    ring = []
    for ds, dt in ((-1, -1), (0, -1), (0, 0), (-1, 0)):
        c = list(lo)
        c[s] += ds
        c[t] += dt
        ring.append(tuple(c) in cubes)
    return tuple(ring)  # type: ignore[return-value]


def _check_edges(cubes: set[Coord]) -> set[tuple[Coord, Coord]]:
    """Surface edges; raise on two diagonal cubes sharing only an edge."""
    edges = set()
    for c in sorted(cubes):
        for axis, lo, hi in _cube_edges(c):
            if (lo, hi) in edges:
                continue
            ring = _edge_ring(cubes, axis, lo)
            n = sum(ring)
            if n == 4:
                continue
            if n == 2 and ring[0] == ring[2]:
                raise NonManifoldEdge((lo, hi))
            edges.add((lo, hi))
    return edges


def _check_vertices(cubes: set[Coord]) -> set[Coord]:
    """Surface vertices; every one must have a disk neighbourhood."""
    vertices = set()
    for c in sorted(cubes):
        for d in product((0, 1), repeat=3):
            v = add(c, d)  # type: ignore[arg-type]
            if v in vertices:
                continue
            mask = _occupancy(cubes, v)
            if mask == 0xFF:
                continue
            if not fan_is_disk(mask):
                raise NonManifoldVertex(v)
            vertices.add(v)
    return vertices


def build_polycube(cubes: Iterable[Iterable[int]], name: str | None = None,
                   annotations: dict[str, Coord] | None = None) -> Polycube:
    """Validate a cube list and return a :class:`Polycube`.

    Checks run in a fixed order: emptiness, duplicates, manifold edges,
    manifold vertices, face-connectivity, genus.  Touchings are checked
    before connectivity so that two cubes meeting only along an edge are
    reported as a non-manifold edge rather than as two components.
    """
    coords: list[Coord] = []
    for c in cubes:
        t = tuple(c)
        if len(t) != 3 or not all(isinstance(x, int) and not isinstance(x, bool) for x in t):
            raise PolycubeFormatError(f"cube coordinate {c!r} is not three integers")
        coords.append(t)  # type: ignore[arg-type]
    if not coords:
        raise EmptyPolycube("no cubes")
    cubeset: set[Coord] = set()
    for c in coords:
        if c in cubeset:
            raise DuplicateCube(c)
        cubeset.add(c)
    edges = _check_edges(cubeset)
    vertices = _check_vertices(cubeset)
    ncomp = _components(cubeset)
    if ncomp != 1:
        raise Disconnected(ncomp)
    faces = boundary_faces(cubeset)
    euler = len(vertices) - len(edges) + len(faces)
    if euler != 2:
        raise NonZeroGenus(euler)
    return Polycube(frozenset(cubeset), name, dict(annotations or {}))


def dual_graph(p: Polycube) -> DualGraph:
    nodes = tuple(sorted(p.cubes))
    index = {c: i for i, c in enumerate(nodes)}
    edges = []
    for i, c in enumerate(nodes):
        for axis in range(3):
            j = index.get(add(c, unit(axis)))
            if j is not None:
                edges.append((i, j))
    return DualGraph(nodes, tuple(sorted(edges)))


def is_polycube_tree(p: Polycube) -> bool:
    # Connectivity is guaranteed by validation, so acyclic <=> |E| = n - 1.
    return len(dual_graph(p).edges) == len(p.cubes) - 1


def load_polycube(path: str | Path) -> Polycube:
    """Read ``{"name": ..., "cubes": [[x, y, z], ...]}`` and validate it."""
    try:
        data = json.loads(Path(path).read_text())
    except json.JSONDecodeError as exc:
        raise PolycubeFormatError(f"{path}: {exc}") from exc
    return polycube_from_json(data)


def polycube_from_json(data) -> Polycube:
    if not isinstance(data, dict) or not isinstance(data.get("cubes"), list):
        raise PolycubeFormatError("expected an object with a 'cubes' list")
    name = data.get("name")
    if name is not None and not isinstance(name, str):
        raise PolycubeFormatError("'name' must be a string")
    annotations = {}
    for key, value in (data.get("annotations") or {}).items():
        if not (isinstance(value, list) and len(value) == 3 and all(type(x) is int for x in value)):
            raise PolycubeFormatError(f"annotation {key!r} is not an integer point")
        annotations[key] = tuple(value)
    return build_polycube(data["cubes"], name or None, annotations)


def save_polycube(p: Polycube, path: str | Path) -> None:
    Path(path).write_text(json.dumps(p.to_json()) + "\n")


def neighbours26(c: Coord):
    for d in product((-1, 0, 1), repeat=3):
        if d != (0, 0, 0):
            yield add(c, d)


def random_polycube_tree(n: int, rng, max_tries: int = 10_000) -> Polycube:
    """Grow a polycube tree of ``n`` cubes by gluing each new cube to exactly
    one face of the current shape.  ``rng`` is a :class:`random.Random`."""
    cubes = [(0, 0, 0)]
    cubeset = {(0, 0, 0)}
    tries = 0
    while len(cubes) < n:
        tries += 1
        if tries > max_tries:
            raise RuntimeError(f"could not grow a {n}-cube tree")
        base = rng.choice(cubes)
        axis, sign = rng.choice(DIRECTIONS)
        new = add(base, unit(axis, sign))
        if new in cubeset:
            continue
        touching = sum(add(new, unit(a, s)) in cubeset for a, s in DIRECTIONS)
        if touching != 1:
            continue
        cubeset.add(new)
        ok = all(fan_is_disk(_occupancy(cubeset, add(new, d)))  # type: ignore[arg-type]
                 for d in product((0, 1), repeat=3))
        cubeset.discard(new)
        if not ok:
            continue
        cubes.append(new)
        cubeset.add(new)
    # A cube touching one face with disk neighbourhoods at its corners keeps
    # the surface a sphere; the full validation below re-checks that.
    return build_polycube(cubes, f"tree{n}")
