"""Hereditary and relatively saturated vertex sets, quotient graphs, and the
pairs (H, B) that classify gauge-invariant ideals, all within a degree bound.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from itertools import combinations
from typing import Iterable, Sequence

from .errors import BudgetExceeded, EmptyQuotient, NotHereditary, NotSaturated
from .kgraph import (Degree, Edge, FactorizationRule, KGraph, Path, Skeleton, dbelow, dleq,
                     dsub, validate_kgraph)
from .satiation import (DEFAULT_CAP, FESet, canonical, enumerate_fe, is_exhaustive, satiate)
from .util import parallel_map


def hereditary_closure(g: KGraph, S: Iterable[str]) -> frozenset[str]:
    return frozenset(g.reachable_from(S))


def is_hereditary(g: KGraph, H: Iterable[str]) -> bool:
    H = set(H)
    return g.reachable_from(H) <= H


def _require_hereditary(g: KGraph, H: frozenset[str]) -> None:
    extra = g.reachable_from(H) - H
    if extra:
        raise NotHereditary(f"vertices {sorted(extra)} are reachable from H but not in it",
                            witness=sorted(extra))


@dataclass
class SaturationReport:
    saturated: bool
    bound: Degree
    witness: FESet | None = None

    def __bool__(self) -> bool:
        return self.saturated

    def to_dict(self) -> dict:
        return {"result": "yes_within_bound" if self.saturated else "no",
                "bound": list(self.bound),
                "witness": self.witness.to_json() if self.witness else None}


def is_saturated_relative(g: KGraph, H: Iterable[str], coll: Iterable[FESet], D: Degree,
                          satiated: frozenset[FESet] | None = None) -> SaturationReport:
    H = frozenset(H)
    sat = satiated if satiated is not None else satiate(coll, D).derived
    for E in canonical(sat):
        if E.range not in H and all(p.source in H for p in E.elements):
            return SaturationReport(False, tuple(D), E)
    return SaturationReport(True, tuple(D))


def quotient_graph(g: KGraph, H: Iterable[str]) -> KGraph:
    """The k-graph of paths whose source avoids H."""
    H = frozenset(H)
    _require_hereditary(g, H)
    verts = tuple(v for v in g.skeleton.vertices if v not in H)
    if not verts:
        raise EmptyQuotient("every vertex lies in H")
    lines = dict(zip(g.skeleton.vertices, g.skeleton.vertex_lines or ()))
    edges = tuple(e for e in g.skeleton.edges if e.source not in H)
    kept = {e.id for e in edges}
    squares = tuple(sq for sq in g.rules.squares if sq.left[1] in kept)
    skel = Skeleton(g.k, verts, edges, tuple(lines.get(v) for v in verts))
    return validate_kgraph(skel, FactorizationRule(squares), name=f"{g.name}\\H")


def lift(q: KGraph, p: Path) -> Path:
    """Transport a path into graph q (which must contain all of its edges)."""
    return q.path(p.edges) if p.edges else q.vertex(p.range)


@dataclass
class EsubH:
    derived: frozenset[FESet]
    bound: Degree
    insufficient: list[FESet] = field(default_factory=list)


def e_sub_h(g: KGraph, coll: Iterable[FESet], H: Iterable[str], D: Degree,
            satiated: frozenset[FESet] | None = None) -> EsubH:
    """{E \\ EH : E in the bounded satiation, r(E) not in H}, as sets in the quotient graph."""
    H = frozenset(H)
    _require_hereditary(g, H)
    sat = satiated if satiated is not None else satiate(coll, D).derived
    rep = is_saturated_relative(g, H, coll, D, sat)
    if not rep:
        raise NotSaturated("H is not saturated relative to the collection",
                           witness=rep.witness.to_json())
    q = quotient_graph(g, H) if len(H) < len(g.vertices) else None
    out = set()
    bad = []
    for E in canonical(sat):
        if E.range in H:
            continue
        kept = tuple(lift(q, p) for p in E.elements if p.source not in H)
        X = FESet(E.range, tuple(sorted(kept)), tuple(D))
        out.add(X)
        if not is_exhaustive(X.elements, D):
            bad.append(X)
    return EsubH(frozenset(out), tuple(D), bad)


@dataclass
class IdealPair:
    H: frozenset[str]
    B: frozenset[FESet]
    bound: Degree
    annotations: list[str] = field(default_factory=list)

    @property
    def key(self):
        return (len(self.H), sorted(self.H), len(self.B), [X.key for X in canonical(self.B)])

    def to_dict(self) -> dict:
        return {"H": sorted(self.H), "B": [X.labels() for X in canonical(self.B)],
                "bound": list(self.bound), "annotations": self.annotations}


def hereditary_sets(g: KGraph) -> list[frozenset[str]]:
    out = []
    for size in range(len(g.vertices) + 1):
        for H in combinations(g.vertices, size):
            if is_hereditary(g, H):
                out.append(frozenset(H))
    return out


def satiated_lattice(q: KGraph, base: frozenset[FESet], gens: Sequence[FESet], D: Degree,
                     cap: int = DEFAULT_CAP) -> list[frozenset[FESet]]:
    """All closures of base plus a subset of gens, found by adding one generator at a time."""
    start = satiate(base, D, cap).derived
    seen = {start}
    todo = [start]
    while todo:
        cur = todo.pop()
        for X in gens:
            if X in cur:
                continue
            nxt = satiate(cur | {X}, D, cap).derived
            if nxt not in seen:
                seen.add(nxt)
                todo.append(nxt)
                if len(seen) > cap:
                    raise BudgetExceeded(f"more than {cap} satiated collections")
    return sorted(seen, key=lambda B: (len(B), [X.key for X in canonical(B)]))


def enumerate_ideal_pairs(g: KGraph, coll: Iterable[FESet], D: Degree, max_size: int,
                          cap: int = DEFAULT_CAP) -> list[IdealPair]:
    coll = frozenset(coll)
    D = tuple(D)
    sat = satiate(coll, D, cap).derived

    def pairs_for(H: frozenset[str]) -> list[IdealPair]:
        if not is_saturated_relative(g, H, coll, D, sat):
            return []
        if len(H) == len(g.vertices):
            return [IdealPair(H, frozenset(), D, ["EmptyQuotient"])]
        q = quotient_graph(g, H)
        eh = e_sub_h(g, coll, H, D, sat)
        notes = ["within_bound"]
        if eh.insufficient:
            notes.append("bound_insufficient_for_E_H")
        gens = [X for v in q.vertices for X in canonical(enumerate_fe(q, v, D, max_size))]
        return [IdealPair(H, B, D, list(notes))
                for B in satiated_lattice(q, eh.derived, gens, D, cap)]

    out = []
    for chunk in parallel_map(pairs_for, hereditary_sets(g)):
        out.extend(chunk)
    return out


# ---------------------------------------------------------------- boundary prefixes

@dataclass
class BoundaryPrefix:
    base: str
    path: Path
    assignment: dict[Degree, Path]
    deferred: int = 0

    @property
    def degree(self) -> Degree:
        return self.path.degree

    def to_dict(self) -> dict:
        return {"base": self.base, "degree": list(self.degree), "path": self.path.label,
                "assignment": [[list(n), p.label] for n, p in sorted(self.assignment.items())],
                "deferred_obligations": self.deferred}


def _check_prefix(g: KGraph, x: Path, sat_by_range: dict[str, list[FESet]],
                  avoid: Sequence[Path]) -> int | None:
    """Deferred-obligation count if x qualifies, else None."""
    for lam in avoid:
        if dleq(lam.degree, x.degree) and g.prefix(x, lam.degree) == lam:
            return None
    deferred = 0
    for n in dbelow(x.degree):
        rest = dsub(x.degree, n)
        vert = g.segment(x, n, n).range
        for E in sat_by_range.get(vert, ()):
            if not all(dleq(p.degree, rest) for p in E.elements):
                deferred += 1
                continue
            tailpath = g.segment(x, n, x.degree)
            if not any(g.prefix(tailpath, p.degree) == p for p in E.elements):
                return None
    return deferred


def boundary_prefix_witness(g: KGraph, coll: Iterable[FESet], v: str,
                            avoid: Iterable[Path] = (), D: Degree | None = None,
                            satiated: frozenset[FESet] | None = None) -> BoundaryPrefix | None:
    """A longest path x from v, d(x) <= D, meeting every fully visible satiation member
    at every n <= d(x) and having no element of ``avoid`` as an initial segment.

    Returns None when nothing qualifies within the bound (inconclusive).
    """
    D = tuple(D)
    sat = satiated if satiated is not None else satiate(coll, D).derived
    by_range: dict[str, list[FESet]] = {}
    for E in canonical(sat):
        by_range.setdefault(E.range, []).append(E)
    avoid = sorted(set(avoid))
    cands = sorted(g.paths_up_to(D, v), key=lambda p: (-sum(p.degree), p.key))
    for x in cands:
        deferred = _check_prefix(g, x, by_range, avoid)
        if deferred is not None:
            assignment = {n: g.prefix(x, n) for n in dbelow(x.degree)}
            return BoundaryPrefix(v, x, assignment, deferred)
    return None


def witness_norms(fam, prefix: BoundaryPrefix, avoid: Iterable[Path]) -> list[tuple[Degree, float]]:
    """Norms of Q^F xi_{x(0,q)} for every q <= d(x)."""
    from .toeplitz import gap_projection
    Q = gap_projection(fam, avoid, vertex=prefix.base)
    out = []
    for q, p in sorted(prefix.assignment.items()):
        vec = Q.apply({fam.space.index[p]: 1.0})
        out.append((q, sum(abs(z) ** 2 for z in vec.values()) ** 0.5))
    return out
