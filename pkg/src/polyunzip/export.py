"""SVG and FOLD output for developed nets."""

from __future__ import annotations

import json
from pathlib import Path

from .surface import SurfaceModel
from .unfold import EdgeKind, NetLayout

STROKE = {
    EdgeKind.CUT: "green",
    EdgeKind.MOUNTAIN: "red",
    EdgeKind.VALLEY: "blue",
    EdgeKind.FLAT: "yellow",
}
ASSIGNMENT = {EdgeKind.CUT: "B", EdgeKind.MOUNTAIN: "M", EdgeKind.VALLEY: "V", EdgeKind.FLAT: "F"}
# FOLD convention: valley folds are positive
FOLD_ANGLE = {EdgeKind.CUT: 0, EdgeKind.MOUNTAIN: -90, EdgeKind.VALLEY: 90, EdgeKind.FLAT: 0}


def _net_mesh(s: SurfaceModel, n: NetLayout):
    """Net vertices are face corners merged across glued edges only, so two
    sides of a cut that happen to touch stay separate."""
    parent: dict[tuple[int, int], tuple[int, int]] = {}

    def find(x):
        parent.setdefault(x, x)
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    for f in s.faces:
        for k in range(4):
            find((f.id, k))
    for e in s.edges:
        if n.edge_kind[e.id] == EdgeKind.CUT:
            continue
        fa, fb = e.faces
        for v in (e.u, e.v):
            a = (fa, s.faces[fa].vertices.index(v))
            b = (fb, s.faces[fb].vertices.index(v))
            parent[find(a)] = find(b)
    ids: dict[tuple[int, int], int] = {}
    coords: list[tuple[int, int]] = []
    corner_id = {}
    for f in s.faces:
        for k in range(4):
            root = find((f.id, k))
            if root not in ids:
                ids[root] = len(coords)
                coords.append(n.images[f.id][k])
            corner_id[(f.id, k)] = ids[root]
    faces = [[corner_id[(f.id, k)] for k in range(4)] for f in s.faces]
    edges: list[tuple[int, int]] = []
    kinds: list[EdgeKind] = []
    seen: dict[tuple[int, int, int], int] = {}
    for f in s.faces:
        for i, e in enumerate(f.edges):
            a, b = corner_id[(f.id, i)], corner_id[(f.id, (i + 1) % 4)]
            kind = n.edge_kind[e]
            # glued edges are shared; each side of a cut is its own boundary edge
            key = (e, min(a, b), max(a, b))
            if key in seen:
                continue
            seen[key] = len(edges)
            edges.append((a, b))
            kinds.append(kind)
    return coords, faces, edges, kinds


def to_fold(s: SurfaceModel, n: NetLayout, title: str = "") -> dict:
    coords, faces, edges, kinds = _net_mesh(s, n)
    return {
        "file_spec": 1.1,
        "file_creator": "polyunzip",
        "file_title": title,
        "frame_classes": ["creasePattern"],
        "frame_attributes": ["2D"],
        "vertices_coords": [[x, y] for x, y in coords],
        "faces_vertices": faces,
        "edges_vertices": [list(e) for e in edges],
        "edges_assignment": [ASSIGNMENT[k] for k in kinds],
        "edges_foldAngle": [FOLD_ANGLE[k] for k in kinds],
    }


def write_fold(s: SurfaceModel, n: NetLayout, path: str | Path, title: str = "") -> None:
    Path(path).write_text(json.dumps(to_fold(s, n, title), indent=1) + "\n")


def to_svg(s: SurfaceModel, n: NetLayout, unit: int = 30, margin: int = 10) -> str:
    coords, faces, edges, kinds = _net_mesh(s, n)
    xs = [x for x, _ in coords]
    ys = [y for _, y in coords]
    x0, y1 = min(xs), max(ys)
    w = (max(xs) - x0) * unit + 2 * margin
    h = (y1 - min(ys)) * unit + 2 * margin

    # flip y so the net reads the same way as in the plane
    def px(p):
        return (p[0] - x0) * unit + margin, (y1 - p[1]) * unit + margin

    out = [f'<svg xmlns="http://www.w3.org/2000/svg" width="{w}" height="{h}" '
           f'viewBox="0 0 {w} {h}">']
    for fv in faces:
        pts = " ".join("%d,%d" % px(coords[v]) for v in fv)
        out.append(f'<polygon points="{pts}" fill="white" stroke="none"/>')
    # draw folds first so cut lines stay visible on top
    order = sorted(range(len(edges)), key=lambda i: kinds[i] == EdgeKind.CUT)
    for i in order:
        (ax, ay), (bx, by) = px(coords[edges[i][0]]), px(coords[edges[i][1]])
        width = 2 if kinds[i] == EdgeKind.CUT else 1
        out.append(f'<line x1="{ax}" y1="{ay}" x2="{bx}" y2="{by}" '
                   f'stroke="{STROKE[kinds[i]]}" stroke-width="{width}"/>')
    out.append("</svg>")
    return "\n".join(out) + "\n"


def write_svg(s: SurfaceModel, n: NetLayout, path: str | Path, unit: int = 30) -> None:
    Path(path).write_text(to_svg(s, n, unit))
