"""Planar development of cut polycube surfaces.

Every polycube net lives on the unit grid, so a face is placed as an
integer cell plus a frame (which cell corner each of its four vertices
lands on).  Overlap is then exactly "two faces on one cell".  Nets are
drawn with the outside of the surface facing up, so a frame is always one
of the four rotations; the reflected frames 4..7 exist only for layouts
built by hand.
"""

from __future__ import annotations

import logging
import multiprocessing
import random
import time
from collections import Counter, deque
from dataclasses import dataclass, field
from enum import Enum
from itertools import combinations
from typing import Iterable, Sequence

from .hampath import (ABSENT, BUDGET, FOUND, BudgetExhausted, SearchConfig, SearchStats,
                      VertexSequence, _alternation_feasible, enumerate_zipper_paths)
from .parity import Obstruction, hampath_obstruction
from .surface import SkeletonGraph, SurfaceModel, skeleton_graph

log = logging.getLogger(__name__)

Point = tuple[int, int]

# cell corners, counter-clockwise, and the outward step across each cell side
# (side s runs from corner s to corner s+1)
CORNERS: tuple[Point, ...] = ((0, 0), (1, 0), (1, 1), (0, 1))
SIDE_STEP: tuple[Point, ...] = ((0, -1), (1, 0), (0, 1), (-1, 0))


class EdgeKind(str, Enum):
    CUT = "cut"
    MOUNTAIN = "mountain"
    VALLEY = "valley"
    FLAT = "flat"


class InvalidCut(ValueError):
    def __init__(self, kind: str, detail: str = ""):
        super().__init__(f"{kind}: {detail}" if detail else kind)
        self.kind = kind
        self.detail = detail


class DevelopmentInconsistent(AssertionError):
    pass


@dataclass(frozen=True)
class CutTree:
    """Cut edges as sorted skeleton vertex pairs."""

    edges: frozenset[tuple[int, int]]

    @classmethod
    def from_pairs(cls, pairs: Iterable[Sequence[int]]) -> "CutTree":
        return cls(frozenset((min(u, v), max(u, v)) for u, v in pairs))

    @classmethod
    def from_path(cls, seq: VertexSequence | Sequence[int]) -> "CutTree":
        vs = seq.vertices if isinstance(seq, VertexSequence) else tuple(seq)
        return cls.from_pairs(zip(vs, vs[1:]))

    @property
    def vertices(self) -> frozenset[int]:
        return frozenset(v for e in self.edges for v in e)

    def __len__(self) -> int:
        return len(self.edges)

    def to_list(self) -> list[list[int]]:
        return [list(e) for e in sorted(self.edges)]


def check_cut_tree(g: SkeletonGraph, cut: CutTree) -> None:
    """Raise :class:`InvalidCut` unless ``cut`` is a tree in ``g`` through every corner."""
    for u, v in cut.edges:
        if u not in g.adj or v not in g.adj[u]:
            raise InvalidCut("NotASkeletonEdge", f"({u}, {v})")
    verts = cut.vertices
    missing = [v for v in g.corners if v not in verts]
    if missing and len(g.corners) > 1:
        raise InvalidCut("MissesCorner", str(missing[0]))
    if not cut.edges:
        return
    # a forest with |V| - 1 edges is a tree
    parent = {v: v for v in verts}

    def find(x):
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    for u, v in sorted(cut.edges):
        ru, rv = find(u), find(v)
        if ru == rv:
            raise InvalidCut("NotATree", f"cycle through edge ({u}, {v})")
        parent[ru] = rv
    if len(cut.edges) != len(verts) - 1:
        raise InvalidCut("NotATree", "cut edges are not connected")


@dataclass
class NetLayout:
    """A developed surface.

    ``placement[f] = (cell, frame)``; ``images[f][k]`` is where vertex ``k`` of
    face ``f`` lands.  ``edge_kind`` covers every surface edge.
    """

    cut: CutTree
    placement: dict[int, tuple[Point, int]]
    images: dict[int, tuple[Point, Point, Point, Point]]
    edge_kind: dict[int, EdgeKind]
    overlaps: list[tuple[Point, list[int]]] = field(default_factory=list)

    @property
    def nonoverlapping(self) -> bool:
        return not self.overlaps

    def cells(self) -> list[Point]:
        return [cell for cell, _ in self.placement.values()]

    def kind_counts(self) -> dict[str, int]:
        c = Counter(k.value for k in self.edge_kind.values())
        return {k.value: c.get(k.value, 0) for k in EdgeKind}

    def to_dict(self) -> dict:
        return {
            "faces": len(self.placement),
            "nonoverlapping": self.nonoverlapping,
            "cut": self.cut.to_list(),
            "placement": {str(f): {"cell": list(c), "frame": fr}
                          for f, (c, fr) in sorted(self.placement.items())},
            "edge_kinds": self.kind_counts(),
            "overlaps": [{"cell": list(c), "faces": fs} for c, fs in self.overlaps],
        }


def _frame_images(cell: Point, frame: int) -> tuple[Point, Point, Point, Point]:
    x, y = cell
    if frame < 4:
        order = [(k + frame) % 4 for k in range(4)]
    else:
        order = [(frame - k) % 4 for k in range(4)]
    return tuple((x + CORNERS[i][0], y + CORNERS[i][1]) for i in order)  # type: ignore[return-value]


def _face_links(s: SurfaceModel) -> list[list[tuple[int, int, int]]]:
    """``links[f][i] = (edge, g, j)``: side ``i`` of face ``f`` is side ``j`` of ``g``."""
    side_of = {}
    for f in s.faces:
        for i, e in enumerate(f.edges):
            side_of[(e, f.id)] = i
    links = []
    for f in s.faces:
        row = []
        for e in f.edges:
            a, b = s.edges[e].faces
            h = b if a == f.id else a
            row.append((e, h, side_of[(e, h)]))
        links.append(row)
    return links


def classify_edge(s: SurfaceModel, e: int) -> EdgeKind:
    return {1: EdgeKind.MOUNTAIN, 2: EdgeKind.FLAT, 3: EdgeKind.VALLEY}[s.edge_cube_count(e)]


def _develop(links, nfaces: int, glued: Sequence[bool], root: int = 0):
    """Place faces by rolling across glued edges.  Returns frames per face
    as ``(cell, rot)`` or None for faces that were never reached."""
    place: list = [None] * nfaces
    place[root] = ((0, 0), 0)
    queue = deque([root])
    while queue:
        f = queue.popleft()
        (x, y), r = place[f]
        for i, (e, h, j) in enumerate(links[f]):
            if not glued[e] or place[h] is not None:
                continue
            side = (i + r) % 4
            dx, dy = SIDE_STEP[side]
            place[h] = ((x + dx, y + dy), (side + 2 - j) % 4)
            queue.append(h)
    return place


def unfold(s: SurfaceModel, cut: CutTree) -> NetLayout:
    """Develop the surface cut along ``cut`` into the plane."""
    g = skeleton_graph(s)
    check_cut_tree(g, cut)
    cut_ids = set()
    for u, v in cut.edges:
        cut_ids.add(s.edge_id(u, v))
    glued = [e.id not in cut_ids for e in s.edges]
    links = _face_links(s)
    place = _develop(links, len(s.faces), glued, root=0)
    if any(p is None for p in place):
        raise DevelopmentInconsistent("uncut faces do not form one piece")
    images = {f.id: _frame_images(*place[f.id]) for f in s.faces}
    # closure: both sides of every glued edge develop onto the same segment
    for e in s.edges:
        if not glued[e.id]:
            continue
        fa, fb = e.faces
        pa = {s.faces[fa].vertices[k]: images[fa][k] for k in range(4)}
        pb = {s.faces[fb].vertices[k]: images[fb][k] for k in range(4)}
        if pa[e.u] != pb[e.u] or pa[e.v] != pb[e.v]:
            raise DevelopmentInconsistent(f"edge {e.id} develops to two different segments")
    kinds = {e.id: EdgeKind.CUT if not glued[e.id] else classify_edge(s, e.id) for e in s.edges}
    by_cell: dict[Point, list[int]] = {}
    for f in s.faces:
        by_cell.setdefault(place[f.id][0], []).append(f.id)
    overlaps = sorted((c, fs) for c, fs in by_cell.items() if len(fs) > 1)
    return NetLayout(cut, {f.id: place[f.id] for f in s.faces}, images, kinds, overlaps)


def overlap_check(n: NetLayout) -> bool:
    """True iff no two faces share a cell.  Touching along edges or at
    corners is fine."""
    cells = n.cells()
    return len(cells) == len(set(cells))


# ---------------------------------------------------------------------------
# Independent checks on a finished layout.

def boundary_length(s: SurfaceModel, n: NetLayout) -> int:
    """Unit segments of face sides that are not glued to their partner.

    A side counts as glued only if the neighbouring face across the same
    surface edge lands on the identical segment and the edge is not cut.
    """
    total = 0
    for f in s.faces:
        for i, e in enumerate(f.edges):
            seg = frozenset((n.images[f.id][i], n.images[f.id][(i + 1) % 4]))
            a, b = s.edges[e].faces
            h = b if a == f.id else a
            j = s.faces[h].edges.index(e)
            other = frozenset((n.images[h][j], n.images[h][(j + 1) % 4]))
            if n.edge_kind[e] == EdgeKind.CUT or seg != other:
                total += 1
    return total


def full_turn_vertices(s: SurfaceModel, n: NetLayout) -> list[int]:
    """Surface vertices off the cut whose faces do NOT close up to 360 degrees
    around one planar point (empty for a correct development)."""
    on_cut = n.cut.vertices
    bad = []
    for v in s.vertices:
        if v.id in on_cut:
            continue
        points = set()
        quadrants = set()
        for f in v.faces:
            k = s.faces[f].vertices.index(v.id)
            pt = n.images[f][k]
            points.add(pt)
            cell = n.placement[f][0]
            quadrants.add((cell[0] - pt[0], cell[1] - pt[1]))
        if len(points) != 1 or len(quadrants) != 4 or len(v.faces) != 4:
            bad.append(v.id)
    return bad


def round_trip_ok(s: SurfaceModel, n: NetLayout) -> bool:
    """Each face's four vertex images are exactly the corners of its cell."""
    for f in s.faces:
        (x, y), _ = n.placement[f.id]
        want = {(x + dx, y + dy) for dx, dy in CORNERS}
        if set(n.images[f.id]) != want:
            return False
    return True


# ---------------------------------------------------------------------------
# Net shapes up to congruence.

def _dihedral(p: Point, k: int) -> Point:
    x, y = p
    for _ in range(k % 4):
        x, y = -y, x
    return (x, -y) if k >= 4 else (x, y)


def canonical_shape(cells: Iterable[Point]) -> tuple[Point, ...]:
    """Smallest normalised cell tuple over the 8 symmetries of the square."""
    best = None
    cells = list(cells)
    for k in range(8):
        img = [_dihedral(c, k) for c in cells]
        mx = min(x for x, _ in img)
        my = min(y for _, y in img)
        key = tuple(sorted((x - mx, y - my) for x, y in img))
        if best is None or key < best:
            best = key
    return best  # type: ignore[return-value]


def spanning_cut_trees(g: SkeletonGraph) -> list[CutTree]:
    """All spanning trees of a small skeleton (brute force over edge subsets)."""
    edges = g.edge_list()
    n = len(g)
    out = []
    for combo in combinations(edges, n - 1):
        cut = CutTree.from_pairs(combo)
        try:
            check_cut_tree(g, cut)
        except InvalidCut:
            continue
        if cut.vertices == set(g.points):
            out.append(cut)
    return out


@dataclass
class CensusReport:
    trees: int
    classes: int
    all_nonoverlapping: bool
    boundary_ok: bool
    full_turn_ok: bool
    shapes: list[tuple[Point, ...]]

    def to_dict(self) -> dict:
        return {"trees": self.trees, "classes": self.classes,
                "all_nonoverlapping": self.all_nonoverlapping,
                "boundary_ok": self.boundary_ok, "full_turn_ok": self.full_turn_ok}


def net_census(s: SurfaceModel) -> CensusReport:
    """Unfold along every spanning cut tree and count congruence classes."""
    g = skeleton_graph(s)
    trees = spanning_cut_trees(g)
    shapes = set()
    nonover = boundary = turn = True
    for cut in trees:
        n = unfold(s, cut)
        nonover &= overlap_check(n)
        boundary &= boundary_length(s, n) == 2 * len(cut)
        turn &= not full_turn_vertices(s, n)
        shapes.add(canonical_shape(n.cells()))
    return CensusReport(len(trees), len(shapes), nonover, boundary, turn, sorted(shapes))


# ---------------------------------------------------------------------------
# Edge-unfolding search.
#
# A cut tree spanning every vertex is the complement of a spanning tree of
# the face-adjacency graph.  The search works on that face tree: swapping one
# face-tree edge for another is the same as removing a cut edge and
# reconnecting the two cut components with another edge.  Leaf cut edges at
# flat vertices are glued back at the end; that does not move any face.

@dataclass
class UnfoldResult:
    status: str
    cut: CutTree | None = None
    layout: NetLayout | None = None
    sequence: VertexSequence | None = None
    certificate: Obstruction | None = None
    stats: dict = field(default_factory=dict)
    detail: str = ""
    seed: int = 0

    @property
    def found(self) -> bool:
        return self.status == FOUND

    def to_dict(self) -> dict:
        out = {"result": self.status, "seed": self.seed, "detail": self.detail,
               "stats": self.stats}
        out["cut"] = self.cut.to_list() if self.cut else None
        out["path"] = list(self.sequence.vertices) if self.sequence else None
        out["certificate"] = self.certificate.to_dict() if self.certificate else None
        out["layout"] = self.layout.to_dict() if self.layout else None
        return out


def prune_flat_leaves(g: SkeletonGraph, pairs: Iterable[tuple[int, int]]) -> CutTree:
    adj: dict[int, set[int]] = {}
    for u, v in pairs:
        adj.setdefault(u, set()).add(v)
        adj.setdefault(v, set()).add(u)
    stack = [v for v in adj if len(adj[v]) == 1 and g.is_flat(v)]
    while stack:
        v = stack.pop()
        if v not in adj or len(adj[v]) != 1:
            continue
        (w,) = adj.pop(v)
        adj[w].discard(v)
        if len(adj[w]) == 1 and g.is_flat(w):
            stack.append(w)
        elif not adj[w]:
            del adj[w]
    return CutTree.from_pairs((u, v) for u in adj for v in adj[u] if u < v)


class _FaceTreeAnnealer:
    """Simulated annealing over spanning trees of the face-adjacency graph."""

    def __init__(self, s: SurfaceModel, rng: random.Random):
        self.s = s
        self.rng = rng
        self.links = _face_links(s)
        self.nf = len(s.faces)
        self.ne = len(s.edges)
        self.ends = [e.faces for e in s.edges]

    def greedy_tree(self) -> list[bool]:
        """Grow a face tree at random, preferring placements on free cells."""
        rng = self.rng
        in_tree = [False] * self.ne
        root = rng.randrange(self.nf)
        place = {root: ((0, 0), 0)}
        used = Counter([(0, 0)])
        frontier = [(root, i) for i in range(4)]
        while len(place) < self.nf:
            free, blocked = [], []
            for f, i in frontier:
                e, h, j = self.links[f][i]
                if h in place:
                    continue
                (x, y), r = place[f]
                side = (i + r) % 4
                cell = (x + SIDE_STEP[side][0], y + SIDE_STEP[side][1])
                (blocked if used[cell] else free).append((f, i, h, cell, (side + 2 - j) % 4, e))
            frontier = [(f, i) for f, i, *_ in free + blocked]
            f, i, h, cell, rot, e = rng.choice(free or blocked)
            place[h] = (cell, rot)
            used[cell] += 1
            in_tree[e] = True
            frontier.extend((h, k) for k in range(4))
        return in_tree

    def layout(self, in_tree: list[bool]):
        place = _develop(self.links, self.nf, in_tree, root=0)
        used: dict[Point, list[int]] = {}
        for f, (cell, _) in enumerate(place):
            used.setdefault(cell, []).append(f)
        bad = [fs for fs in used.values() if len(fs) > 1]
        return sum(len(fs) - 1 for fs in bad), bad

    def _tree_path(self, in_tree: list[bool], a: int, b: int) -> list[int]:
        """Face-tree edges on the path between faces ``a`` and ``b``."""
        prev = {a: (None, None)}
        queue = deque([a])
        while queue:
            f = queue.popleft()
            if f == b:
                break
            for e, h, _ in self.links[f]:
                if in_tree[e] and h not in prev:
                    prev[h] = (f, e)
                    queue.append(h)
        out = []
        f = b
        while prev[f][0] is not None:
            f, e = prev[f]
            out.append(e)
        return out

    def propose(self, in_tree: list[bool], bad: list[list[int]]) -> tuple[int, int]:
        """Pick a non-tree edge to add and a tree edge on its cycle to drop;
        mostly near overlapping faces."""
        rng = self.rng
        if bad and rng.random() < 0.8:
            f = rng.choice(rng.choice(bad))
            options = [e for e, _, _ in self.links[f] if not in_tree[e]]
            if not options:
                options = [e for e in range(self.ne) if not in_tree[e]]
        else:
            options = [e for e in range(self.ne) if not in_tree[e]]
        add = rng.choice(options)
        a, b = self.ends[add]
        drop = rng.choice(self._tree_path(in_tree, a, b))
        return add, drop

    def run(self, steps: int, deadline: float, t_start: float = 2.0):
        in_tree = self.greedy_tree()
        score, bad = self.layout(in_tree)
        best_score, best = score, list(in_tree)
        done = 0
        for step in range(steps):
            if score == 0:
                break
            if (step & 63) == 0 and time.monotonic() > deadline:
                break
            temp = max(0.05, t_start * (1 - step / steps))
            add, drop = self.propose(in_tree, bad)
            in_tree[add], in_tree[drop] = True, False
            new, new_bad = self.layout(in_tree)
            delta = new - score
            if delta <= 0 or self.rng.random() < pow(2.718281828, -delta / temp):
                score, bad = new, new_bad
                if score < best_score:
                    best_score, best = score, list(in_tree)
            else:
                in_tree[add], in_tree[drop] = False, True
            done += 1
        return best_score, best, done


def _restart_seed(seed: int, restart: int) -> int:
    return seed * 1_000_003 + restart


def _one_restart(args):
    s, seed, restart, steps, deadline = args
    rng = random.Random(_restart_seed(seed, restart))
    ann = _FaceTreeAnnealer(s, rng)
    score, in_tree, done = ann.run(steps, deadline)
    return restart, score, in_tree, done


def cut_from_face_tree(s: SurfaceModel, in_tree: Sequence[bool]) -> CutTree:
    g = skeleton_graph(s)
    pairs = [(e.u, e.v) for e in s.edges if not in_tree[e.id]]
    return prune_flat_leaves(g, pairs)


def edge_unfolding_search(s: SurfaceModel, cfg: SearchConfig = SearchConfig(),
                          steps_per_restart: int = 20_000,
                          max_restarts: int | None = None) -> UnfoldResult:
    """Look for a cut tree whose development does not overlap.

    Restart ``r`` uses its own generator seeded from ``(cfg.seed, r)``; with
    ``cfg.threads > 1`` restarts run in batches on worker processes and the
    lowest successful restart index wins, so the answer matches a serial run
    whenever the per-restart step cap (not the clock) is what ends a restart.
    """
    t0 = time.monotonic()
    deadline = t0 + cfg.time_budget
    steps_total = 0
    best_score = None
    restart = 0
    pool = multiprocessing.get_context("spawn").Pool(cfg.threads) if cfg.threads > 1 else None
    try:
        while time.monotonic() < deadline and steps_total < cfg.max_expansions:
            if max_restarts is not None and restart >= max_restarts:
                break
            batch = range(restart, restart + cfg.threads)
            jobs = [(s, cfg.seed, r, steps_per_restart, deadline) for r in batch]
            outs = pool.map(_one_restart, jobs) if pool else [_one_restart(j) for j in jobs]
            restart += cfg.threads
            for r, score, in_tree, done in sorted(outs, key=lambda o: o[0]):
                steps_total += done
                best_score = score if best_score is None else min(best_score, score)
                if score == 0:
                    cut = cut_from_face_tree(s, in_tree)
                    layout = unfold(s, cut)
                    if not overlap_check(layout):
                        raise DevelopmentInconsistent("search net overlaps after re-development")
                    stats = {"restarts": r + 1, "steps": steps_total,
                             "elapsed_ms": round((time.monotonic() - t0) * 1000, 3)}
                    return UnfoldResult(FOUND, cut, layout, stats=stats, seed=cfg.seed,
                                        detail=f"found on restart {r}")
    finally:
        if pool:
            pool.close()
            pool.join()
    stats = {"restarts": restart, "steps": steps_total, "best_overlap": best_score,
             "elapsed_ms": round((time.monotonic() - t0) * 1000, 3)}
    return UnfoldResult(BUDGET, stats=stats, seed=cfg.seed, detail="budget exhausted")


def unfold_with_seed(s: SurfaceModel, seed: int, restart: int,
                     steps_per_restart: int = 20_000) -> UnfoldResult:
    """Replay one restart of :func:`edge_unfolding_search` without a clock."""
    _, score, in_tree, done = _one_restart((s, seed, restart, steps_per_restart, float("inf")))
    if score != 0:
        return UnfoldResult(BUDGET, seed=seed, stats={"steps": done, "best_overlap": score},
                            detail=f"restart {restart} ends with overlap {score}")
    cut = cut_from_face_tree(s, in_tree)
    return UnfoldResult(FOUND, cut, unfold(s, cut), seed=seed, stats={"steps": done},
                        detail=f"restart {restart}")


# ---------------------------------------------------------------------------
# Zipper unfoldings: the cut is a single path.

def zipper_unfolding_search(s: SurfaceModel, cfg: SearchConfig = SearchConfig()) -> UnfoldResult:
    """Try zipper cut paths one by one until one develops without overlap."""
    t0 = time.monotonic()
    g = skeleton_graph(s)
    stats = SearchStats()

    def report(**extra):
        return {**stats.deterministic(), **extra,
                "elapsed_ms": round((time.monotonic() - t0) * 1000, 3)}

    if not g.flats:
        cert = hampath_obstruction(g)
        if cert is not None:
            return UnfoldResult(ABSENT, certificate=cert, stats=report(paths=0), seed=cfg.seed,
                                detail="no zipper cut path exists (parity certificate)")
    if cfg.prune_parity and not _alternation_feasible(g, g.corners, g.flats):
        return UnfoldResult(ABSENT, stats=report(paths=0), seed=cfg.seed,
                            detail="no zipper cut path exists (parity bound)")
    tried = 0
    try:
        for seq in enumerate_zipper_paths(g, cfg, stats):
            tried += 1
            cut = CutTree.from_path(seq)
            layout = unfold(s, cut)
            if overlap_check(layout):
                return UnfoldResult(FOUND, cut, layout, sequence=seq, stats=report(paths=tried),
                                    seed=cfg.seed, detail=f"path {tried} develops without overlap")
    except BudgetExhausted as exc:
        return UnfoldResult(BUDGET, stats=report(paths=tried), seed=cfg.seed, detail=str(exc))
    if tried == 0:
        return UnfoldResult(ABSENT, stats=report(paths=0), seed=cfg.seed,
                            detail="no zipper cut path exists (exhaustive search)")
    return UnfoldResult(ABSENT, stats=report(paths=tried), seed=cfg.seed,
                        detail=f"all {tried} zipper cut paths overlap")
