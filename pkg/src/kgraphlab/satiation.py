"""Finite exhaustive sets and bounded satiation.

Everything here works inside a degree bound D: a set is only ever produced if
all its elements have degree <= D. Membership in a result is therefore sound
(each member has an explicit derivation) while absence is inconclusive.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from itertools import combinations, product
from typing import Iterable, Iterator

from .alignment import ext, lambda_min
from .errors import BudgetExceeded, KGraphError, MixedRange, VertexMember
from .kgraph import Degree, KGraph, Path, dbelow, dleq, labels

DEFAULT_CAP = 10 ** 6


@dataclass(frozen=True)
class FESet:
    range: str
    elements: tuple[Path, ...]
    certified_bound: Degree | None = field(default=None, compare=False)

    @property
    def key(self):
        return (self.range, tuple(p.key for p in self.elements))

    def __lt__(self, other: "FESet") -> bool:
        return self.key < other.key

    def __iter__(self):
        return iter(self.elements)

    def __len__(self) -> int:
        return len(self.elements)

    def fits(self, D: Degree) -> bool:
        return all(dleq(p.degree, D) for p in self.elements)

    def labels(self) -> list[str]:
        return [p.label for p in self.elements]

    def to_json(self) -> dict:
        return {"range": self.range, "elements": self.labels()}


def fe(paths: Iterable[Path], bound: Degree | None = None) -> FESet:
    """Wrap a finite set of nonvertex paths with a common range."""
    elems = tuple(sorted(set(paths)))
    if not elems:
        raise KGraphError("an exhaustive set needs at least one element")
    ranges = {p.range for p in elems}
    if len(ranges) != 1:
        raise MixedRange(f"elements have ranges {sorted(ranges)}", witness=labels(elems))
    for p in elems:
        if p.is_vertex():
            raise VertexMember(f"vertex {p.label} cannot belong to an exhaustive set",
                               witness=p.label)
    return FESet(elems[0].range, elems, bound)


def collection(g: KGraph, lists: Iterable[Iterable[str]]) -> frozenset[FESet]:
    """Build a collection from path literals, e.g. [["e"], ["f", "e.f"]]."""
    return frozenset(fe(g.parse_path(s) for s in item) for item in lists)


def canonical(coll: Iterable[FESet]) -> list[FESet]:
    return sorted(set(coll))


# ---------------------------------------------------------------- exhaustiveness

@dataclass
class ExhaustiveReport:
    exhaustive: bool
    bound: Degree
    witness: Path | None = None

    def __bool__(self) -> bool:
        return self.exhaustive

    def to_dict(self) -> dict:
        return {"result": "yes_within_bound" if self.exhaustive else "no",
                "bound": list(self.bound),
                "witness": self.witness.label if self.witness else None}


def is_exhaustive(E: Iterable[Path], D: Degree) -> ExhaustiveReport:
    E = fe(E).elements
    g = E[0].graph
    v = E[0].range
    for mu in g.paths_up_to(D, v):
        if not any(lambda_min(lam, mu) for lam in E):
            return ExhaustiveReport(False, tuple(D), mu)
    return ExhaustiveReport(True, tuple(D))


def enumerate_fe(g: KGraph, v: str, D: Degree, max_size: int) -> frozenset[FESet]:
    cands = [p for p in g.paths_up_to(D, v) if not p.is_vertex()]
    out = set()
    for size in range(1, max_size + 1):
        for E in combinations(cands, size):
            if is_exhaustive(E, D):
                out.add(FESet(v, tuple(E), tuple(D)))
    return frozenset(out)


# ---------------------------------------------------------------- Sigma maps

@dataclass
class SigmaResult:
    derived: frozenset[FESet]
    dropped: int = 0
    provenance: dict = field(default_factory=dict, repr=False)


def _make(paths, D) -> FESet | None:
    elems = tuple(sorted(set(paths)))
    if not all(dleq(p.degree, D) for p in elems):
        return None
    return FESet(elems[0].range, elems)


def _sigma1(coll, D, cap) -> Iterator[tuple[FESet | None, dict]]:
    for G in canonical(coll):
        g = G.elements[0].graph
        rest = [p for p in g.paths_up_to(D, G.range)
                if not p.is_vertex() and p not in G.elements]
        if 2 ** len(rest) > cap:
            raise BudgetExceeded(f"{2 ** len(rest)} supersets of {G.labels()} exceed cap {cap}")
        for size in range(len(rest) + 1):
            for extra in combinations(rest, size):
                yield _make(G.elements + extra, D), {"from": G.labels(),
                                                     "added": [p.label for p in extra]}


def _sigma2(coll, D, cap) -> Iterator[tuple[FESet | None, dict]]:
    for G in canonical(coll):
        g = G.elements[0].graph
        for mu in g.paths_up_to(D, G.range):
            if any(g.has_prefix(mu, lam) for lam in G.elements):
                continue
            X = ext(mu, G.elements)
            if X:
                yield _make(X, D), {"from": G.labels(), "mu": mu.label}


def _sigma3(coll, D, cap) -> Iterator[tuple[FESet | None, dict]]:
    for G in canonical(coll):
        g = G.elements[0].graph
        choices = [[n for n in dbelow(lam.degree) if any(n)] for lam in G.elements]
        for ns in product(*choices):
            cut = [g.prefix(lam, n) for lam, n in zip(G.elements, ns)]
            yield _make(cut, D), {"from": G.labels(), "n": [list(n) for n in ns]}


def _sigma4(coll, D, cap) -> Iterator[tuple[FESet | None, dict]]:
    by_range: dict[str, list[FESet]] = {}
    for X in canonical(coll):
        by_range.setdefault(X.range, []).append(X)
    for G in canonical(coll):
        g = G.elements[0].graph
        grown: dict[Path, list[tuple[frozenset, FESet]]] = {}
        for lam in G.elements:
            grown[lam] = []
            for X in by_range.get(lam.source, []):
                ext_set = frozenset(g.compose(lam, a) for a in X.elements)
                if all(dleq(p.degree, D) for p in ext_set):
                    grown[lam].append((ext_set, X))
                else:
                    yield None, {}
        for size in range(1, len(G) + 1):
            for F in combinations(G.elements, size):
                # unions are deduplicated stage by stage; distinct choices often coincide
                stage: dict[frozenset, list] = {
                    frozenset(p for p in G.elements if p not in F): []}
                for lam in F:
                    nxt: dict[frozenset, list] = {}
                    for acc, picks in stage.items():
                        for ext_set, X in grown[lam]:
                            nxt.setdefault(acc | ext_set, picks + [X.labels()])
                    stage = nxt
                for acc, picks in stage.items():
                    yield _make(acc, D), {"from": G.labels(), "F": [p.label for p in F],
                                          "F_lambda": picks}


_SIGMA = {1: _sigma1, 2: _sigma2, 3: _sigma3, 4: _sigma4}


def sigma(i: int, coll: Iterable[FESet], D: Degree, cap: int = DEFAULT_CAP) -> SigmaResult:
    """One application of the i-th Sigma map; over-bound results are dropped and counted."""
    base = frozenset(coll)
    out = set(base)
    prov: dict[FESet, dict] = {}
    dropped = 0
    for X, how in _SIGMA[i](base, tuple(D), cap):
        if X is None:
            dropped += 1
        elif X not in out:
            out.add(X)
            prov[X] = how
            if len(out) > cap:
                raise BudgetExceeded(f"more than {cap} sets derived")
    return SigmaResult(frozenset(out), dropped, prov)


@dataclass
class SatiationResult:
    derived: frozenset[FESet]
    bound: Degree
    saturated_within_bound: bool
    dropped: int = 0
    rounds: int = 0

    def to_dict(self) -> dict:
        return {"bound": list(self.bound), "dropped": self.dropped, "rounds": self.rounds,
                "saturated_within_bound": self.saturated_within_bound,
                "derived": [X.to_json() for X in canonical(self.derived)]}


def satiate(coll: Iterable[FESet], D: Degree, cap: int = DEFAULT_CAP) -> SatiationResult:
    cur = frozenset(coll)
    dropped = 0
    rounds = 0
    while True:
        nxt = cur
        for i in (1, 2, 3, 4):
            step = sigma(i, nxt, D, cap)
            dropped += step.dropped
            nxt = step.derived
        rounds += 1
        if nxt == cur:
            return SatiationResult(cur, tuple(D), True, dropped, rounds)
        cur = nxt


@dataclass
class SatiatedReport:
    satiated: bool
    bound: Degree
    violations: list[dict] = field(default_factory=list)

    def __bool__(self) -> bool:
        return self.satiated

    @property
    def axiom(self) -> str | None:
        return self.violations[0]["axiom"] if self.violations else None

    @property
    def witness(self) -> dict | None:
        return self.violations[0] if self.violations else None

    def axioms(self) -> list[str]:
        return [v["axiom"] for v in self.violations]

    def to_dict(self) -> dict:
        return {"result": "yes_within_bound" if self.satiated else "no",
                "bound": list(self.bound), "axiom": self.axiom,
                "violations": self.violations}


def is_satiated(coll: Iterable[FESet], D: Degree, cap: int = DEFAULT_CAP) -> SatiatedReport:
    """Check (S1)-(S4) on bounded instances; reports the first witness for each violated axiom."""
    base = frozenset(coll)
    found = []
    for i in (1, 2, 3, 4):
        step = sigma(i, base, D, cap)
        missing = canonical(step.derived - base)
        if missing:
            X = missing[0]
            found.append({"axiom": f"S{i}", "missing": X.to_json(), **step.provenance[X]})
    return SatiatedReport(not found, tuple(D), found)
