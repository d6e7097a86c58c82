"""Coordinate-sum 2-colouring and the parity-imbalance certificate."""

from __future__ import annotations

from dataclasses import dataclass

from .lattice import Coord
from .surface import SkeletonGraph


def color(point: Coord) -> int:
    return (point[0] + point[1] + point[2]) % 2


@dataclass(frozen=True)
class ParityReport:
    count0: int
    count1: int

    @property
    def imbalance(self) -> int:
        return abs(self.count0 - self.count1)

    def to_dict(self) -> dict:
        return {"count0": self.count0, "count1": self.count1, "imbalance": self.imbalance}


@dataclass(frozen=True)
class Obstruction:
    """Proof that a graph has no Hamiltonian path.  Only kind: parity imbalance."""

    report: ParityReport
    kind: str = "ParityImbalance"

    @property
    def justification(self) -> str:
        r = self.report
        return (
            f"bipartite graph with colour classes {r.count0} and {r.count1}: a Hamiltonian "
            f"path alternates colours, so it allows an imbalance of at most 1, not {r.imbalance}"
        )

    def to_dict(self) -> dict:
        return {"kind": self.kind, **self.report.to_dict(), "justification": self.justification}


class NotBipartite(AssertionError):
    pass


def parity_report(g: SkeletonGraph) -> ParityReport:
    """Colour counts over ``g``'s vertices.

    Raises :class:`NotBipartite` if some edge joins equal colours; that can
    only happen for a graph that did not come from a lattice.
    """
    counts = [0, 0]
    for v, pt in g.points.items():
        c = color(pt)
        counts[c] += 1
        for w in g.adj[v]:
            if color(g.points[w]) == c:
                raise NotBipartite(f"edge {pt}-{g.points[w]} joins equal colours")
    return ParityReport(counts[0], counts[1])


def hampath_obstruction(g: SkeletonGraph) -> Obstruction | None:
    """Certificate when imbalance > 1.  ``None`` only means "no certificate"."""
    report = parity_report(g)
    if report.imbalance > 1:
        return Obstruction(report)
    return None
