"""Stand-alone checkers for search output.

Deliberately naive and separate from the searchers: they only look at the
edge list and vertex classes of the graph.
"""

from __future__ import annotations

from typing import Sequence

from .surface import SkeletonGraph


def _edge_set(g: SkeletonGraph) -> set[frozenset[int]]:
    return {frozenset(e) for e in g.edge_list()}


def _simple_walk(g: SkeletonGraph, seq: Sequence[int]) -> bool:
    if len(seq) == 0 or len(set(seq)) != len(seq):
        return False
    if any(v not in g.points for v in seq):
        return False
    edges = _edge_set(g)
    return all(frozenset((a, b)) in edges for a, b in zip(seq, seq[1:]))


def is_hamiltonian_path(g: SkeletonGraph, seq: Sequence[int]) -> bool:
    return _simple_walk(g, seq) and set(seq) == set(g.points)


def is_hamiltonian_cycle(g: SkeletonGraph, seq: Sequence[int]) -> bool:
    if not is_hamiltonian_path(g, seq):
        return False
    if len(seq) < 3:
        return False
    return frozenset((seq[-1], seq[0])) in _edge_set(g)


def is_zipper_path(g: SkeletonGraph, seq: Sequence[int]) -> bool:
    """Simple path through every corner vertex; flat vertices optional."""
    if not _simple_walk(g, seq):
        return False
    corners = {v for v, a in g.angle.items() if a != 4}
    return corners <= set(seq)
