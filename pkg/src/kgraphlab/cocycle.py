"""Circle-valued 2-cocycles on a k-graph."""

from __future__ import annotations

import cmath
import json
import math
from dataclasses import dataclass, field

from .errors import InvalidCocycle, NotASubgraph, NotComposable, WrongGraphShape
from .kgraph import Degree, KGraph, Path, dadd, dleq, djoin, dzero

PHASE_TOL = 1e-9

_QUARTER = {0: 1 + 0j, 1: 1j, 2: -1 + 0j, 3: -1j}


def unit_phase(turns: float) -> complex:
    """exp(2 pi i turns), exact at quarter turns so that phases multiply cleanly."""
    t = turns % 1.0
    q = round(t * 4)
    if abs(t * 4 - q) < 1e-15:
        return _QUARTER[q % 4]
    return cmath.exp(2j * math.pi * t)


@dataclass
class Cocycle:
    """A cocycle of one of three kinds: trivial, rotation(theta) or a lookup table.

    Table entries default to 1 for composable pairs that are not listed. A cocycle
    obtained by restriction evaluates through its parent.
    """
    kind: str
    graph: KGraph
    theta: float = 0.0
    table: dict[tuple[tuple, tuple], complex] = field(default_factory=dict)
    bound: Degree | None = None
    parent: "Cocycle | None" = None

    def __call__(self, mu: Path, nu: Path) -> complex:
        if mu.source != nu.range:
            raise NotComposable(f"s({mu.label}) != r({nu.label})", witness=[mu.label, nu.label])
        if self.parent is not None:
            return self.parent(self.parent.graph.path(mu.edges or (mu.range,)),
                               self.parent.graph.path(nu.edges or (nu.range,)))
        if self.kind == "trivial":
            return 1 + 0j
        if self.kind == "rotation":
            return unit_phase(self.theta * mu.degree[1] * nu.degree[0])
        return self.table.get((_pkey(mu), _pkey(nu)), 1 + 0j)

    def describe(self) -> dict:
        out: dict = {"kind": self.kind}
        if self.kind == "rotation":
            out["theta"] = self.theta
        if self.kind == "table":
            out["entries"] = len(self.table)
        if self.parent is not None:
            out["restricted_from"] = self.parent.describe()
        return out


def _pkey(p: Path) -> tuple:
    return (p.range, p.edges)


def trivial_cocycle(g: KGraph) -> Cocycle:
    return Cocycle("trivial", g)


def _rotation_shape(g: KGraph) -> tuple[str, str]:
    if g.k != 2 or len(g.vertices) != 1 or len(g.edges) != 2:
        raise WrongGraphShape("rotation cocycle needs one vertex and one edge of each of two colours")
    by_color = {e.color: e.id for e in g.edges.values()}
    if set(by_color) != {1, 2}:
        raise WrongGraphShape("rotation cocycle needs one edge of each colour")
    return by_color[1], by_color[2]


def rotation_cocycle(g: KGraph, theta: float) -> Cocycle:
    """c(e^m f^n, e^p f^q) = exp(2 pi i theta n p) on the one-vertex 2-graph."""
    _rotation_shape(g)
    if not 0.0 <= theta < 1.0:
        raise InvalidCocycle(f"theta must lie in [0,1), got {theta}")
    return Cocycle("rotation", g, theta=float(theta))


def table_cocycle(g: KGraph, entries: dict[tuple[Path, Path], complex],
                  bound: Degree | None = None, validate: bool = True) -> Cocycle:
    table = {}
    top = dzero(g.k)
    for (mu, nu), z in entries.items():
        if mu.source != nu.range:
            raise NotComposable(f"table entry for non-composable pair {mu.label}, {nu.label}",
                                witness=[mu.label, nu.label])
        table[(_pkey(mu), _pkey(nu))] = complex(z)
        top = djoin(top, dadd(mu.degree, nu.degree))
    c = Cocycle("table", g, table=table, bound=tuple(bound) if bound else top)
    if validate:
        rep = check_cocycle_identity(c, g, c.bound)
        if not rep.passed:
            raise InvalidCocycle(f"table fails {rep.failure}", witness=rep.witness)
    return c


def load_table_cocycle(g: KGraph, path: str, validate: bool = True) -> Cocycle:
    with open(path, encoding="utf-8") as fh:
        data = json.load(fh)
    entries = {(g.parse_path(p["mu"]), g.parse_path(p["nu"])): complex(p["re"], p["im"])
               for p in data["pairs"]}
    bound = tuple(data["bound"]) if "bound" in data else None
    return table_cocycle(g, entries, bound, validate)


@dataclass
class CocycleReport:
    passed: bool
    bound: Degree
    max_residual: float
    triples: int
    failure: str | None = None
    witness: list | None = None

    def to_dict(self) -> dict:
        return {"pass": self.passed, "bound": list(self.bound), "max_residual": self.max_residual,
                "triples_checked": self.triples, "failure": self.failure,
                "witness": self.witness}


def check_cocycle_identity(c: Cocycle, g: KGraph, D: Degree, tol: float = PHASE_TOL) -> CocycleReport:
    """Exhaustively check unit modulus, normalisation and the cocycle identity up to D."""
    paths = g.paths_up_to(D)
    worst = 0.0
    failure = witness = None

    def note(kind, res, wit):
        nonlocal worst, failure, witness
        worst = max(worst, res)
        if res > tol and failure is None:
            failure, witness = kind, wit

    for lam in paths:
        note("normalisation", abs(c(lam, g.vertex(lam.source)) - 1), [lam.label, lam.source])
        note("normalisation", abs(c(g.vertex(lam.range), lam) - 1), [lam.range, lam.label])
    for lam in paths:
        for mu in g.paths_up_to(D, lam.source):
            if dleq(dadd(lam.degree, mu.degree), D):
                note("unit-modulus", abs(abs(c(lam, mu)) - 1), [lam.label, mu.label])
    count = 0
    for lam in paths:
        for mu in g.paths_up_to(D, lam.source):
            lm_deg = dadd(lam.degree, mu.degree)
            if not dleq(lm_deg, D):
                continue
            lm = g.compose(lam, mu)
            for nu in g.paths_up_to(D, mu.source):
                if not dleq(dadd(lm_deg, nu.degree), D):
                    continue
                count += 1
                mn = g.compose(mu, nu)
                res = abs(c(lam, mu) * c(lm, nu) - c(mu, nu) * c(lam, mn))
                note("cocycle-identity", res, [lam.label, mu.label, nu.label])
    return CocycleReport(failure is None, tuple(D), worst, count, failure, witness)


def restrict(c: Cocycle, sub: KGraph) -> Cocycle:
    parent = c
    pg = c.graph
    for v in sub.vertices:
        if v not in pg.skeleton.vertices:
            raise NotASubgraph(f"vertex {v!r} is not in the parent graph")
    for e in sub.edges.values():
        pe = pg.edges.get(e.id)
        if pe is None or (pe.color, pe.range, pe.source) != (e.color, e.range, e.source):
            raise NotASubgraph(f"edge {e.id!r} does not embed in the parent graph")
    for sq in sub.rules.squares:
        if pg._fwd.get(sq.left) != sq.right:
            raise NotASubgraph(f"square {sq.left} is not a parent square")
    if sub is pg:
        return c
    return Cocycle(c.kind, sub, theta=c.theta, bound=c.bound, parent=parent)
