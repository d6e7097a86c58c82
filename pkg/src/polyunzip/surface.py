"""Boundary surface and 1-skeleton of a polycube."""

from __future__ import annotations

from dataclasses import dataclass, field
from enum import Enum
from pathlib import Path
from typing import Iterable

from .lattice import Coord, Polycube, boundary_faces, face_corners, unit


@dataclass(frozen=True)
class Face:
    id: int
    cube: Coord
    axis: int
    sign: int
    vertices: tuple[int, int, int, int]  # CCW seen from outside
    edges: tuple[int, int, int, int]  # edges[i] joins vertices[i] and vertices[i+1]

    @property
    def normal(self) -> Coord:
        return unit(self.axis, self.sign)


@dataclass(frozen=True)
class Edge:
    id: int
    u: int
    v: int
    faces: tuple[int, int]


@dataclass(frozen=True)
class Vertex:
    id: int
    point: Coord
    faces: tuple[int, ...]
    edges: tuple[int, ...]


@dataclass(frozen=True)
class SurfaceModel:
    cubes: frozenset[Coord]
    faces: tuple[Face, ...]
    edges: tuple[Edge, ...]
    vertices: tuple[Vertex, ...]
    _vertex_index: dict[Coord, int] = field(repr=False, compare=False)
    _edge_index: dict[tuple[int, int], int] = field(repr=False, compare=False)

    def vertex_id(self, point: Coord) -> int:
        return self._vertex_index[tuple(point)]  # type: ignore[index]

    def edge_id(self, u: int, v: int) -> int:
        return self._edge_index[(u, v) if u < v else (v, u)]

    def find_edge(self, u: int, v: int) -> int | None:
        return self._edge_index.get((u, v) if u < v else (v, u))

    def edge_cube_count(self, e: int) -> int:
        """Cubes around an edge: 1 convex, 2 coplanar, 3 reflex."""
        edge = self.edges[e]
        a, b = self.vertices[edge.u].point, self.vertices[edge.v].point
        axis = next(i for i in range(3) if a[i] != b[i])
        lo = min(a, b)
        s, t = (axis + 1) % 3, (axis + 2) % 3
        count = 0
        for ds in (-1, 0):
            for dt in (-1, 0):
                c = list(lo)
                c[s] += ds
                c[t] += dt
                count += tuple(c) in self.cubes
        return count


def extract_surface(p: Polycube) -> SurfaceModel:
    raw = boundary_faces(p.cubes)
    quads = [face_corners(c, a, s) for c, a, s in raw]
    points = sorted({v for q in quads for v in q})
    vindex = {pt: i for i, pt in enumerate(points)}
    pairs = sorted({
        tuple(sorted((vindex[q[i]], vindex[q[(i + 1) % 4]])))
        for q in quads for i in range(4)
    })
    eindex = {pair: i for i, pair in enumerate(pairs)}
    edge_faces: list[list[int]] = [[] for _ in pairs]
    vert_faces: list[list[int]] = [[] for _ in points]
    vert_edges: list[list[int]] = [[] for _ in points]
    faces = []
    for fid, ((cube, axis, sign), quad) in enumerate(zip(raw, quads)):
        vids = tuple(vindex[v] for v in quad)
        eids = tuple(eindex[tuple(sorted((vids[i], vids[(i + 1) % 4])))] for i in range(4))
        for e in eids:
            edge_faces[e].append(fid)
        for v in vids:
            vert_faces[v].append(fid)
        faces.append(Face(fid, cube, axis, sign, vids, eids))  # type: ignore[arg-type]
    edges = []
    for eid, (u, v) in enumerate(pairs):
        vert_edges[u].append(eid)
        vert_edges[v].append(eid)
        assert len(edge_faces[eid]) == 2, "surface edge must bound exactly two faces"
        edges.append(Edge(eid, u, v, tuple(edge_faces[eid])))  # type: ignore[arg-type]
    vertices = tuple(
        Vertex(i, pt, tuple(vert_faces[i]), tuple(vert_edges[i])) for i, pt in enumerate(points)
    )
    return SurfaceModel(p.cubes, tuple(faces), tuple(edges), vertices, vindex, eindex)


class VertexClass(str, Enum):
    CORNER = "corner"
    FLAT = "flat"


@dataclass(frozen=True)
class SkeletonGraph:
    """The 1-skeleton: lattice points with corner/flat class and unit-edge adjacency.

    Vertex ids are those of the originating :class:`SurfaceModel`; induced
    subgraphs keep the ids of the surviving vertices.
    """

    points: dict[int, Coord]
    angle: dict[int, int]  # total incident face angle, in quarter turns
    adj: dict[int, frozenset[int]]

    @property
    def vertices(self) -> list[int]:
        return sorted(self.points)

    def __len__(self) -> int:
        return len(self.points)

    def is_flat(self, v: int) -> bool:
        return self.angle[v] == 4

    def vclass(self, v: int) -> VertexClass:
        return VertexClass.FLAT if self.angle[v] == 4 else VertexClass.CORNER

    def degree(self, v: int) -> int:
        return len(self.adj[v])

    @property
    def corners(self) -> list[int]:
        return [v for v in self.vertices if self.angle[v] != 4]

    @property
    def flats(self) -> list[int]:
        return [v for v in self.vertices if self.angle[v] == 4]

    def edge_list(self) -> list[tuple[int, int]]:
        return sorted((u, v) for u in self.adj for v in self.adj[u] if u < v)

    def by_point(self, point: Iterable[int]) -> int:
        point = tuple(point)
        for v, p in self.points.items():
            if p == point:
                return v
        raise UnknownVertex(point)

    def dump_edge_list(self, path: str | Path) -> None:
        """Write ``u v`` lines plus a ``.classes`` sidecar with ``id x y z class``."""
        path = Path(path)
        path.write_text("".join(f"{u} {v}\n" for u, v in self.edge_list()))
        sidecar = path.with_name(path.name + ".classes")
        sidecar.write_text("".join(
            f"{v} {' '.join(map(str, self.points[v]))} {self.vclass(v).value}\n"
            for v in self.vertices
        ))


class UnknownVertex(KeyError):
    pass


def skeleton_graph(s: SurfaceModel) -> SkeletonGraph:
    points = {v.id: v.point for v in s.vertices}
    angle = {v.id: len(v.faces) for v in s.vertices}
    adj: dict[int, set[int]] = {v.id: set() for v in s.vertices}
    for e in s.edges:
        adj[e.u].add(e.v)
        adj[e.v].add(e.u)
    return SkeletonGraph(points, angle, {v: frozenset(n) for v, n in adj.items()})


def delete_vertices(g: SkeletonGraph, drop: Iterable[int]) -> SkeletonGraph:
    """Induced subgraph on ``g``'s vertices minus ``drop``; classes are kept."""
    drop = set(drop)
    missing = drop - set(g.points)
    if missing:
        raise UnknownVertex(sorted(missing))
    keep = [v for v in g.points if v not in drop]
    return SkeletonGraph(
        {v: g.points[v] for v in keep},
        {v: g.angle[v] for v in keep},
        {v: frozenset(g.adj[v] - drop) for v in keep},
    )


def polycube_skeleton(p: Polycube) -> SkeletonGraph:
    return skeleton_graph(extract_surface(p))
