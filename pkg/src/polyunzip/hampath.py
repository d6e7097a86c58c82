"""Exact Hamiltonian path / cycle search and zipper cut-path search.

All "absent" answers are either backed by a parity certificate or by an
exhaustive depth-first search whose pruning rules are sound:

* parity: a path alternates colours, so the colour counts still to be
  visited must be realisable by an alternating sequence;
* degree: an unvisited required vertex with at most one usable neighbour
  has to be the final vertex, and there is only one final vertex;
* connectivity: every unvisited required vertex must be reachable from the
  path's end through unvisited vertices.

Dead (unvisited set, end) states are also remembered, which is what keeps the
search tractable when the parity rule is switched off.
"""

from __future__ import annotations

import logging
import sys
import time
from dataclasses import dataclass, field
from itertools import combinations
from typing import Iterator, Sequence

from .lattice import Coord, Polycube, add, face_corners, is_polycube_tree, dual_graph, sub
from .parity import Obstruction, color, hampath_obstruction, parity_report
from .surface import SkeletonGraph, delete_vertices, polycube_skeleton
from .verify import is_hamiltonian_cycle, is_hamiltonian_path, is_zipper_path

log = logging.getLogger(__name__)

FOUND, ABSENT, BUDGET = "found", "absent", "budget"


@dataclass(frozen=True)
class SearchConfig:
    max_expansions: int = 50_000_000
    time_budget: float = 600.0  # seconds
    seed: int = 0
    prune_parity: bool = True
    prune_degree: bool = True
    prune_connectivity: bool = True
    memoize: bool = True
    memo_limit: int = 2_000_000
    max_flat_subsets: int = 4096
    threads: int = 1

    def __post_init__(self):
        if self.max_expansions <= 0 or self.time_budget <= 0:
            raise ValueError("search budgets must be positive")
        if self.threads < 1:
            raise ValueError("threads must be >= 1")

    def to_dict(self) -> dict:
        return {
            "max_expansions": self.max_expansions,
            "time_budget": self.time_budget,
            "seed": self.seed,
            "prune_parity": self.prune_parity,
            "prune_degree": self.prune_degree,
            "prune_connectivity": self.prune_connectivity,
            "memoize": self.memoize,
            "memo_limit": self.memo_limit,
            "max_flat_subsets": self.max_flat_subsets,
            "threads": self.threads,
        }


@dataclass(frozen=True)
class VertexSequence:
    vertices: tuple[int, ...]
    closed: bool = False

    def __len__(self) -> int:
        return len(self.vertices)

    def points(self, g: SkeletonGraph) -> list[Coord]:
        return [g.points[v] for v in self.vertices]

    def edges(self) -> list[tuple[int, int]]:
        vs = self.vertices
        pairs = list(zip(vs, vs[1:]))
        if self.closed:
            pairs.append((vs[-1], vs[0]))
        return pairs


@dataclass
class SearchStats:
    expansions: int = 0
    elapsed_ms: float = 0.0
    pruned_parity: int = 0
    pruned_degree: int = 0
    pruned_connectivity: int = 0
    memo_hits: int = 0

    def deterministic(self) -> dict:
        """Everything but wall-clock time."""
        return {
            "expansions": self.expansions,
            "pruned_parity": self.pruned_parity,
            "pruned_degree": self.pruned_degree,
            "pruned_connectivity": self.pruned_connectivity,
            "memo_hits": self.memo_hits,
        }

    def to_dict(self) -> dict:
        return {**self.deterministic(), "elapsed_ms": round(self.elapsed_ms, 3)}

    def absorb(self, other: "SearchStats") -> None:
        self.expansions += other.expansions
        self.pruned_parity += other.pruned_parity
        self.pruned_degree += other.pruned_degree
        self.pruned_connectivity += other.pruned_connectivity
        self.memo_hits += other.memo_hits


@dataclass
class SearchResult:
    status: str
    sequence: VertexSequence | None = None
    certificate: Obstruction | None = None
    stats: SearchStats = field(default_factory=SearchStats)
    detail: str = ""
    cases: list[dict] = field(default_factory=list)

    @property
    def found(self) -> bool:
        return self.status == FOUND

    def to_dict(self, g: SkeletonGraph | None = None) -> dict:
        out: dict = {"result": self.status}
        if self.sequence is not None:
            out["path"] = list(self.sequence.vertices)
            out["closed"] = self.sequence.closed
            if g is not None:
                out["points"] = [list(p) for p in self.sequence.points(g)]
        else:
            out["path"] = []
        out["certificate"] = self.certificate.to_dict() if self.certificate else None
        out["stats"] = self.stats.to_dict()
        if self.detail:
            out["detail"] = self.detail
        if self.cases:
            out["cases"] = self.cases
        return out


class BudgetExhausted(Exception):
    pass


class TooManyFlatVertices(ValueError):
    pass


class NotATree(ValueError):
    pass


class InternalInvariantBroken(AssertionError):
    pass


def _bits(x: int) -> Iterator[int]:
    while x:
        b = x & -x
        yield b.bit_length() - 1
        x ^= b


class _PathSearch:
    """Depth-first search for a simple path (or cycle) through all ``required``
    vertices that may additionally pass through ``optional`` ones.

    ``avail[w]`` counts the neighbours of ``w`` that can still be joined to
    it: unvisited vertices, the current end, and (for cycles) the start.
    """

    def __init__(self, g: SkeletonGraph, required: Sequence[int], optional: Sequence[int],
                 closed: bool, cfg: SearchConfig, stats: SearchStats, deadline: float):
        self.ids = sorted(set(required) | set(optional))
        idx = {v: i for i, v in enumerate(self.ids)}
        n = len(self.ids)
        self.n = n
        self.shift = n.bit_length()
        req = set(required)
        self.required = [v in req for v in self.ids]
        self.color = [color(g.points[v]) for v in self.ids]
        self.nbrs = [sorted(idx[w] for w in g.adj[v] if w in idx) for v in self.ids]
        self.nbrmask = [sum(1 << j for j in nb) for nb in self.nbrs]
        self.closed = closed
        self.cfg = cfg
        self.stats = stats
        self.deadline = deadline
        self.reqmask = sum(1 << i for i in range(n) if self.required[i])
        self.no_end = [False] * n
        # (unvisited set, end) states known to lead nowhere.  Exhausted starts
        # only add restrictions, so a dead state stays dead for later starts.
        self.dead: set[int] = set()
        self.yields = 0

    def _tick(self) -> None:
        s = self.stats
        s.expansions += 1
        if s.expansions >= self.cfg.max_expansions:
            raise BudgetExhausted("expansion budget")
        if (s.expansions & 1023) == 0 and time.monotonic() > self.deadline:
            raise BudgetExhausted("time budget")

    def _reset(self) -> None:
        n = self.n
        self.visited = [False] * n
        self.avail = [len(nb) for nb in self.nbrs]
        self.free = (1 << n) - 1
        self.rem_req = [0, 0]
        self.rem_opt = [0, 0]
        for i in range(n):
            (self.rem_req if self.required[i] else self.rem_opt)[self.color[i]] += 1
        # low: required unvisited vertices with at most one link left;
        # zero: with none; stuck: low ones that may not end the path.
        self.low = self.zero = self.stuck = 0
        for i in range(n):
            if self.required[i]:
                self._count(i, 1)

    def _count(self, w: int, sign: int) -> None:
        a = self.avail[w]
        if a <= 1:
            self.low += sign
            if a == 0:
                self.zero += sign
            if self.no_end[w]:
                self.stuck += sign

    # Parity bound: the vertices after the current end alternate colours,
    # starting with the colour opposite to the end's.
    def _parity_ok(self, end_color: int) -> bool:
        d, c = 1 - end_color, end_color
        lo = self.rem_req[d] - (self.rem_req[c] + self.rem_opt[c])
        hi = self.rem_req[d] + self.rem_opt[d] - self.rem_req[c]
        return lo <= 1 and hi >= 0

    def _connected(self, cur: int) -> bool:
        free = self.free
        need = free & self.reqmask
        if not need:
            return True
        seen = self.nbrmask[cur] & free
        frontier = seen
        while frontier:
            if need & ~seen == 0:
                return True
            nxt = 0
            for b in _bits(frontier):
                nxt |= self.nbrmask[b]
            frontier = nxt & free & ~seen
            seen |= frontier
        return need & ~seen == 0

    def run(self, starts: Sequence[int]) -> Iterator[list[int]]:
        """Yield paths from each start in turn.  For open paths, a start that
        has been exhausted may no longer end a path, so each path comes out
        once up to reversal."""
        idx = {v: i for i, v in enumerate(self.ids)}
        for s in starts:
            si = idx[s]
            self._reset()
            self.start = si
            self._enter(si)
            yield from ([self.ids[i] for i in p] for p in self._extend(si, [si]))
            if not self.closed:
                self.no_end[si] = True

    def _enter(self, v: int) -> None:
        if self.required[v]:
            self._count(v, -1)
            self.rem_req[self.color[v]] -= 1
        else:
            self.rem_opt[self.color[v]] -= 1
        self.visited[v] = True
        self.free &= ~(1 << v)

    def _leave(self, v: int) -> None:
        self.visited[v] = False
        self.free |= 1 << v
        if self.required[v]:
            self.rem_req[self.color[v]] += 1
            self._count(v, 1)
        else:
            self.rem_opt[self.color[v]] += 1

    def _retire(self, v: int) -> None:
        """``v`` stops being an end of the path."""
        for w in self.nbrs[v]:
            live = not self.visited[w] and self.required[w]
            if live:
                self._count(w, -1)
            self.avail[w] -= 1
            if live:
                self._count(w, 1)

    def _restore(self, v: int) -> None:
        for w in self.nbrs[v]:
            live = not self.visited[w] and self.required[w]
            if live:
                self._count(w, -1)
            self.avail[w] += 1
            if live:
                self._count(w, 1)

    def _done(self, cur: int) -> bool:
        if self.rem_req[0] or self.rem_req[1]:
            return False
        if self.closed:
            return self.start in self.nbrs[cur] and self.n >= 3
        return not self.no_end[cur]

    def _stranded(self) -> bool:
        if self.closed:
            # every unvisited vertex still needs two links
            return self.low > 0
        return self.zero > 0 or self.low > 1 or self.stuck > 0

    def _extend(self, cur: int, path: list[int]) -> Iterator[list[int]]:
        if self._done(cur):
            self.yields += 1
            yield list(path)
            return
        if self.rem_req[0] == 0 and self.rem_req[1] == 0 and self.closed:
            return
        cfg = self.cfg
        stats = self.stats
        if cfg.prune_degree and self._stranded():
            stats.pruned_degree += 1
            return
        key = self.free << self.shift | cur
        if cfg.memoize:
            if key in self.dead:
                stats.memo_hits += 1
                return
            before = self.yields
        # The start of a cycle stays an open end for the whole search.
        retire = not (self.closed and cur == self.start)
        if retire:
            self._retire(cur)
        try:
            order = [w for w in self.nbrs[cur] if not self.visited[w]]
            order.sort(key=lambda w: (self.avail[w], w))
            for w in order:
                self._tick()
                self._enter(w)
                try:
                    if cfg.prune_parity and not self.closed and not self._parity_ok(self.color[w]):
                        stats.pruned_parity += 1
                        continue
                    if cfg.prune_connectivity and not self._connected(w):
                        stats.pruned_connectivity += 1
                        continue
                    path.append(w)
                    yield from self._extend(w, path)
                    path.pop()
                finally:
                    self._leave(w)
        finally:
            if retire:
                self._restore(cur)
        if cfg.memoize and self.yields == before and len(self.dead) < cfg.memo_limit:
            self.dead.add(key)


def _deadline(cfg: SearchConfig) -> float:
    return time.monotonic() + cfg.time_budget


def _path_starts(g: SkeletonGraph, required: Sequence[int]) -> list[int]:
    """Start vertices: forced endpoints (degree 1) first, then by degree, id."""
    return sorted(required, key=lambda v: (len(g.adj[v]), v))


def _first(gen: Iterator[list[int]]) -> list[int] | None:
    for path in gen:
        return path
    return None


def _search(g: SkeletonGraph, required, optional, closed: bool, cfg: SearchConfig,
            stats: SearchStats, deadline: float) -> Iterator[list[int]]:
    engine = _PathSearch(g, required, optional, closed, cfg, stats, deadline)
    if closed:
        starts = [min(required, key=lambda v: (len(g.adj[v]), v))]
    else:
        starts = _path_starts(g, required)
    return engine.run(starts)


def _finish(result: SearchResult, t0: float) -> SearchResult:
    result.stats.elapsed_ms = (time.monotonic() - t0) * 1000.0
    return result


def find_hamiltonian_path(g: SkeletonGraph, cfg: SearchConfig = SearchConfig()) -> SearchResult:
    if len(g) == 0:
        raise ValueError("empty graph")
    t0 = time.monotonic()
    stats = SearchStats()
    if cfg.prune_parity:
        cert = hampath_obstruction(g)
        if cert is not None:
            return _finish(SearchResult(ABSENT, certificate=cert, stats=stats,
                                        detail="parity certificate"), t0)
    sys.setrecursionlimit(max(sys.getrecursionlimit(), 4 * len(g) + 1000))
    try:
        path = _first(_search(g, g.vertices, [], False, cfg, stats, _deadline(cfg)))
    except BudgetExhausted as exc:
        return _finish(SearchResult(BUDGET, stats=stats, detail=str(exc)), t0)
    if path is None:
        return _finish(SearchResult(ABSENT, stats=stats, detail="exhaustive search"), t0)
    if not is_hamiltonian_path(g, path):
        raise InternalInvariantBroken(f"search returned an invalid path {path}")
    return _finish(SearchResult(FOUND, VertexSequence(tuple(path)), stats=stats), t0)


def find_hamiltonian_cycle(g: SkeletonGraph, cfg: SearchConfig = SearchConfig()) -> SearchResult:
    if len(g) == 0:
        raise ValueError("empty graph")
    t0 = time.monotonic()
    stats = SearchStats()
    if len(g) < 3 or any(len(g.adj[v]) < 2 for v in g.points):
        return _finish(SearchResult(ABSENT, stats=stats, detail="vertex of degree < 2"), t0)
    if cfg.prune_parity:
        report = parity_report(g)
        if report.imbalance != 0:
            # A cycle in a bipartite graph alternates colours and has even length.
            return _finish(SearchResult(
                ABSENT, stats=stats,
                certificate=Obstruction(report) if report.imbalance > 1 else None,
                detail=f"parity: cycle needs balanced colours, imbalance {report.imbalance}"), t0)
    sys.setrecursionlimit(max(sys.getrecursionlimit(), 4 * len(g) + 1000))
    try:
        path = _first(_search(g, g.vertices, [], True, cfg, stats, _deadline(cfg)))
    except BudgetExhausted as exc:
        return _finish(SearchResult(BUDGET, stats=stats, detail=str(exc)), t0)
    if path is None:
        return _finish(SearchResult(ABSENT, stats=stats, detail="exhaustive search"), t0)
    if not is_hamiltonian_cycle(g, path):
        raise InternalInvariantBroken(f"search returned an invalid cycle {path}")
    return _finish(SearchResult(FOUND, VertexSequence(tuple(path), closed=True), stats=stats), t0)


# ---------------------------------------------------------------------------
# Zipper cut paths: simple paths through every corner, flats optional.

def _canonical_subset(subset: frozenset[int], automorphisms) -> bool:
    key = tuple(sorted(subset))
    return all(tuple(sorted(a[v] for v in subset)) >= key for a in automorphisms)


def flat_subsets(g: SkeletonGraph, automorphisms=None) -> list[frozenset[int]]:
    """All subsets of the flat vertices, largest first (the "all flats" case leads)."""
    flats = g.flats
    out = []
    for k in range(len(flats), -1, -1):
        for combo in combinations(flats, k):
            s = frozenset(combo)
            if automorphisms and not _canonical_subset(s, automorphisms):
                continue
            out.append(s)
    return out


def _zipper_flat_subsets(g, cfg, automorphisms, t0) -> SearchResult:
    flats = g.flats
    if 2 ** len(flats) > cfg.max_flat_subsets:
        raise TooManyFlatVertices(
            f"{len(flats)} flat vertices give {2 ** len(flats)} subsets "
            f"(bound {cfg.max_flat_subsets}); use DirectDFS")
    stats = SearchStats()
    cases = []
    deadline = _deadline(cfg)
    budget_hit = False
    flat_set = set(flats)
    for subset in flat_subsets(g, automorphisms):
        remaining = deadline - time.monotonic()
        if remaining <= 0:
            budget_hit = True
            break
        sub_g = delete_vertices(g, flat_set - subset)
        left = cfg.max_expansions - stats.expansions
        if left <= 0:
            budget_hit = True
            break
        sub_cfg = SearchConfig(**{**cfg.to_dict(), "max_expansions": left, "time_budget": remaining})
        res = find_hamiltonian_path(sub_g, sub_cfg)
        stats.absorb(res.stats)
        case = {
            "included_flats": [list(g.points[v]) for v in sorted(subset)],
            "excluded_flats": [list(g.points[v]) for v in sorted(flat_set - subset)],
            "result": res.status,
            "certificate": res.certificate.to_dict() if res.certificate else None,
            "detail": res.detail,
        }
        cases.append(case)
        if res.found:
            if not is_zipper_path(g, res.sequence.vertices):
                raise InternalInvariantBroken("zipper path failed validation")
            return SearchResult(FOUND, res.sequence, stats=stats, cases=cases,
                                detail=f"Hamiltonian path on corners plus {len(subset)} flats")
        if res.status == BUDGET:
            budget_hit = True
            break
    if budget_hit:
        return SearchResult(BUDGET, stats=stats, cases=cases, detail="budget exhausted")
    cert = hampath_obstruction(g) if not flats and cfg.prune_parity else None
    return SearchResult(ABSENT, certificate=cert, stats=stats, cases=cases,
                        detail=f"all {len(cases)} flat-vertex subsets have no Hamiltonian path")


def _alternation_feasible(g: SkeletonGraph, required, optional) -> bool:
    """Can a colour-alternating sequence contain every required vertex and
    some of the optional ones?  Needs counts A, B of the two colours with
    |A - B| <= 1 inside the ranges the graph allows."""
    req, opt = [0, 0], [0, 0]
    for v in required:
        req[color(g.points[v])] += 1
    for v in optional:
        opt[color(g.points[v])] += 1
    lo = req[0] - (req[1] + opt[1])
    hi = req[0] + opt[0] - req[1]
    return lo <= 1 and hi >= -1


def _zipper_direct(g, cfg, t0) -> SearchResult:
    stats = SearchStats()
    corners = g.corners
    flats = g.flats
    if not corners:
        return SearchResult(FOUND, VertexSequence((g.vertices[0],)), stats=stats)
    cert = None
    if cfg.prune_parity and not flats:
        cert = hampath_obstruction(g)
        if cert is not None:
            return SearchResult(ABSENT, certificate=cert, stats=stats, detail="parity certificate")
    sys.setrecursionlimit(max(sys.getrecursionlimit(), 4 * len(g) + 1000))
    if cfg.prune_parity and not _alternation_feasible(g, corners, flats):
        stats.pruned_parity += 1
        return SearchResult(ABSENT, stats=stats,
                            detail="parity bound: no alternating sequence covers all corners")
    engine = _PathSearch(g, corners, flats, False, cfg, stats, _deadline(cfg))
    try:
        path = _first(engine.run(_path_starts(g, corners)))
    except BudgetExhausted as exc:
        return SearchResult(BUDGET, stats=stats, detail=str(exc))
    if path is None:
        return SearchResult(ABSENT, stats=stats, detail="exhaustive search")
    if not is_zipper_path(g, path):
        raise InternalInvariantBroken("zipper path failed validation")
    return SearchResult(FOUND, VertexSequence(tuple(path)), stats=stats)


def zipper_path_search(g: SkeletonGraph, cfg: SearchConfig = SearchConfig(),
                       strategy: str = "FlatSubsets", automorphisms=None) -> SearchResult:
    """Search for a zipper cut path: a simple path through every corner vertex.

    ``FlatSubsets`` runs a Hamiltonian path search on corners plus each subset
    of flat vertices.  ``DirectDFS`` runs one search in which flats may be
    visited or skipped.  ``automorphisms`` (vertex-id mappings) let
    ``FlatSubsets`` skip subsets equivalent to one already tried.
    """
    if len(g) == 0:
        raise ValueError("empty graph")
    t0 = time.monotonic()
    if strategy.lower() in ("flatsubsets", "flat_subsets", "subsets"):
        res = _zipper_flat_subsets(g, cfg, automorphisms or [], t0)
    elif strategy.lower() in ("directdfs", "direct_dfs", "direct", "dfs"):
        res = _zipper_direct(g, cfg, t0)
    else:
        raise ValueError(f"unknown strategy {strategy!r}")
    return _finish(res, t0)


def enumerate_zipper_paths(g: SkeletonGraph, cfg: SearchConfig = SearchConfig(),
                           stats: SearchStats | None = None) -> Iterator[VertexSequence]:
    """Every zipper cut path once, up to reversal.

    Paths end on corners only: a path ending on a flat vertex is a longer
    version of a path without it and cuts the same corners.
    """
    stats = stats if stats is not None else SearchStats()
    corners = g.corners
    if not corners:
        return
    if cfg.prune_parity and not g.flats and hampath_obstruction(g) is not None:
        return
    sys.setrecursionlimit(max(sys.getrecursionlimit(), 4 * len(g) + 1000))
    engine = _PathSearch(g, corners, g.flats, False, cfg, stats, _deadline(cfg))
    for path in engine.run(_path_starts(g, corners)):
        yield VertexSequence(tuple(path))


# ---------------------------------------------------------------------------
# Constructive Hamiltonian cycle for polycube trees.

_SINGLE_CUBE_CYCLE = ((0, 0, 0), (1, 0, 0), (1, 1, 0), (0, 1, 0),
                      (0, 1, 1), (1, 1, 1), (1, 0, 1), (0, 0, 1))


def leaf_removal_order(p: Polycube) -> list[Coord]:
    """Cubes in the order they are glued back: reverse of repeatedly deleting
    the smallest dual-tree leaf."""
    dg = dual_graph(p)
    adj = [set(a) for a in dg.adjacency()]
    alive = set(range(len(dg.nodes)))
    removed = []
    while len(alive) > 1:
        leaf = min((i for i in alive if len(adj[i]) == 1), key=lambda i: dg.nodes[i])
        removed.append(leaf)
        alive.discard(leaf)
        for j in adj[leaf]:
            adj[j].discard(leaf)
        adj[leaf].clear()
    removed.append(alive.pop())
    return [dg.nodes[i] for i in reversed(removed)]


class _Cycle:
    """Undirected cycle over lattice points, stored as neighbour pairs."""

    def __init__(self, seq: Sequence[Coord]):
        self.link: dict[Coord, list[Coord]] = {}
        n = len(seq)
        for i, v in enumerate(seq):
            self.link[v] = [seq[i - 1], seq[(i + 1) % n]]

    def has_edge(self, a: Coord, b: Coord) -> bool:
        return b in self.link.get(a, ())

    def replace(self, a: Coord, b: Coord, via: Sequence[Coord]) -> None:
        """Swap edge a-b for the path a, *via, b."""
        self.link[a].remove(b)
        self.link[b].remove(a)
        chain = [a, *via, b]
        for v in via:
            self.link[v] = []
        for x, y in zip(chain, chain[1:]):
            self.link[x].append(y)
            self.link[y].append(x)

    def undo(self, a: Coord, b: Coord, via: Sequence[Coord]) -> None:
        for v in via:
            del self.link[v]
        self.link[a].remove(via[0])
        self.link[b].remove(via[-1])
        self.link[a].append(b)
        self.link[b].append(a)

    def walk(self) -> list[Coord]:
        start = min(self.link)
        seq = [start]
        prev, cur = start, min(self.link[start])
        while cur != start:
            seq.append(cur)
            a, b = self.link[cur]
            prev, cur = cur, (b if a == prev else a)
        return seq


def _splice_options(cycle: _Cycle, base: tuple[Coord, ...], far: tuple[Coord, ...]):
    """Every way to reroute cycle edges of the gluing face ``base`` through the
    new far corners (``far[i]`` opposite ``base[i]``).

    Yields ``(pattern, replacements)`` with replacements as ``(a, b, via)``.
    A cycle edge can take the long way round the far face; two opposite cycle
    edges can each take a short detour.
    """
    on = [cycle.has_edge(base[i], base[(i + 1) % 4]) for i in range(4)]
    count = sum(on)
    if count == 0 or count == 4:
        return
    p = lambda i: base[i % 4]  # noqa: E731
    q = lambda i: far[i % 4]  # noqa: E731
    if count == 3:
        i = next(i for i in range(4) if not on[(i + 3) % 4])
        # path p_i p_{i+1} p_{i+2} p_{i+3}: short detours on its two outer edges
        yield "three", [(p(i), p(i + 1), [q(i), q(i + 1)]),
                        (p(i + 2), p(i + 3), [q(i + 2), q(i + 3)])]
    elif count == 2 and on[0] == on[2]:
        i = 0 if on[0] else 1
        yield "two-opposite", [(p(i), p(i + 1), [q(i), q(i + 1)]),
                               (p(i + 2), p(i + 3), [q(i + 2), q(i + 3)])]
    name = {3: "three", 2: "two-opposite" if on[0] == on[2] else "two-adjacent", 1: "one"}[count]
    for i in range(4):
        if on[i]:
            yield name, [(p(i), p(i + 1), [q(i), q(i + 3), q(i + 2), q(i + 1)])]


def _face_load(cycle: _Cycle, base) -> int:
    return sum(cycle.has_edge(base[i], base[(i + 1) % 4]) for i in range(4))


_PATTERN_RANK = {3: 0, 2: 1, 1: 2}


def _gluing(parent: Coord, cube: Coord):
    d = sub(cube, parent)
    axis = next(i for i in range(3) if d[i])
    base = face_corners(parent, axis, d[axis])
    return base, tuple(add(v, d) for v in base)


def tree_hamiltonian_cycle(p: Polycube, pattern_counts: dict | None = None) -> VertexSequence:
    """Hamiltonian cycle of a polycube tree's skeleton, built cube by cube.

    Start from an 8-cycle on one cube; each later cube is glued to one face
    of the current object and its four far corners are spliced into the
    cycle by rerouting cycle edges that lie on the gluing face.  Any cube
    adjacent to the placed part may come next (the reverse of some leaf
    removal order); the one whose gluing face carries the most cycle edges
    is taken, ties broken by coordinate.
    """
    if not is_polycube_tree(p):
        raise NotATree(p.name or "polycube")
    dg = dual_graph(p)
    adj = dg.adjacency()
    nodes = dg.nodes
    first = leaf_removal_order(p)[0]
    cycle = _Cycle([add(first, d) for d in _SINGLE_CUBE_CYCLE])
    placed = {nodes.index(first)}
    frontier = {j: nodes.index(first) for j in adj[nodes.index(first)]}
    counts = pattern_counts if pattern_counts is not None else {}
    while frontier:
        def rank(j):
            base, _ = _gluing(nodes[frontier[j]], nodes[j])
            k = sum(cycle.has_edge(base[i], base[(i + 1) % 4]) for i in range(4))
            return (_PATTERN_RANK.get(k, 9), nodes[j])
        j = min(frontier, key=rank)
        parent = frontier.pop(j)
        base, far = _gluing(nodes[parent], nodes[j])
        if any(v in cycle.link for v in far):
            raise InternalInvariantBroken(f"far corner of {nodes[j]} already on the surface")
        # faces that cubes still to come will be glued onto
        pending = [_gluing(nodes[frontier[k]], nodes[k])[0] for k in frontier]
        pending += [_gluing(nodes[j], nodes[k])[0] for k in adj[j] if k not in placed]
        best = None
        for pattern, reps in _splice_options(cycle, base, far):
            for a, b, via in reps:
                cycle.replace(a, b, via)
            loads = [_face_load(cycle, f) for f in pending]
            score = (min(loads, default=4), sum(x > 0 for x in loads), sum(loads))
            if best is None or score > best[0]:
                best = (score, pattern, reps)
            for a, b, via in reversed(reps):
                cycle.undo(a, b, via)
        if best is None:
            raise InternalInvariantBroken(
                f"gluing face {base} carries {_face_load(cycle, base)} cycle edges")
        _, pattern, reps = best
        for a, b, via in reps:
            cycle.replace(a, b, via)
        counts[pattern] = counts.get(pattern, 0) + 1
        if pattern in ("two-opposite", "one"):
            log.debug("cube %s spliced with pattern %s", nodes[j], pattern)
        placed.add(j)
        for k in adj[j]:
            if k not in placed:
                frontier[k] = j
    g = polycube_skeleton(p)
    try:
        seq = tuple(g.by_point(v) for v in cycle.walk())
    except KeyError as exc:
        raise InternalInvariantBroken(f"cycle leaves the surface at {exc}") from exc
    if not is_hamiltonian_cycle(g, seq):
        raise InternalInvariantBroken("spliced cycle is not Hamiltonian")
    return VertexSequence(seq, closed=True)
