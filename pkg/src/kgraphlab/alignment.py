"""Minimal common extensions and the finite closures built from them."""

from __future__ import annotations

from dataclasses import dataclass
from itertools import combinations
from typing import Iterable

from .errors import RangeMismatch, SetTooLarge
from .kgraph import Degree, Path, djoin, dleq, dsub, dzero

MAX_VEE = 20


@dataclass(frozen=True, order=True)
class MinPair:
    alpha: Path
    beta: Path


def lambda_min(mu: Path, nu: Path) -> frozenset[MinPair]:
    """Pairs (alpha, beta) with mu alpha = nu beta of degree d(mu) v d(nu)."""
    if mu.range != nu.range:
        return frozenset()
    g = mu.graph
    top = djoin(mu.degree, nu.degree)
    out = set()
    for lam in g.extensions(mu, top):
        if g.prefix(lam, nu.degree) == nu:
            out.add(MinPair(g.segment(lam, mu.degree, top), g.segment(lam, nu.degree, top)))
    return frozenset(out)


def mce(mu: Path, nu: Path) -> frozenset[Path]:
    return frozenset(mu.graph.compose(mu, p.alpha) for p in lambda_min(mu, nu))


@dataclass
class AlignmentReport:
    bound: Degree
    pairs_checked: int
    max_size: int
    bijection_ok: bool
    witness: list | None = None

    @property
    def passed(self) -> bool:
        return self.bijection_ok

    def to_dict(self) -> dict:
        return {"bound": list(self.bound), "pairs_checked": self.pairs_checked,
                "max_lambda_min": self.max_size, "pass": self.passed,
                "witness": self.witness}


def check_finitely_aligned(g, D: Degree) -> AlignmentReport:
    """Audit |MCE(mu,nu)| = |Lambda^min(mu,nu)| on all pairs of degree <= D."""
    paths = g.paths_up_to(D)
    biggest, count, witness = 0, 0, None
    for mu in paths:
        for nu in paths:
            if mu.range != nu.range:
                continue
            count += 1
            lm = lambda_min(mu, nu)
            biggest = max(biggest, len(lm))
            if witness is None and len(mce(mu, nu)) != len(lm):
                witness = [mu.label, nu.label]
    return AlignmentReport(tuple(D), count, biggest, witness is None, witness)


def _common_range(F: Iterable[Path]) -> str | None:
    ranges = {p.range for p in F}
    if len(ranges) > 1:
        raise RangeMismatch(f"paths have different ranges {sorted(ranges)}",
                            witness=sorted(ranges))
    return next(iter(ranges), None)


def ext(mu: Path, E: Iterable[Path]) -> frozenset[Path]:
    out = set()
    for lam in E:
        if lam.range != mu.range:
            raise RangeMismatch(f"r({lam.label})={lam.range} differs from r({mu.label})={mu.range}",
                                witness=[mu.label, lam.label])
        out.update(p.alpha for p in lambda_min(mu, lam))
    return frozenset(out)


def mce_of_set(F: Iterable[Path]) -> frozenset[Path]:
    F = sorted(set(F))
    if not F:
        return frozenset()
    _common_range(F)
    g = F[0].graph
    top = dzero(g.k)
    for a in F:
        top = djoin(top, a.degree)
    return frozenset(lam for lam in g.extensions(F[0], top)
                     if all(g.prefix(lam, a.degree) == a for a in F[1:]))


def vee_closure(F: Iterable[Path]) -> frozenset[Path]:
    """Union of MCE(G) over the nonempty subsets G of F."""
    F = sorted(set(F))
    if len(F) > MAX_VEE:
        raise SetTooLarge(f"vee closure capped at {MAX_VEE} generators, got {len(F)}")
    _common_range(F)
    out: set[Path] = set()
    for size in range(1, len(F) + 1):
        for G in combinations(F, size):
            out |= mce_of_set(G)
    return frozenset(out)


@dataclass(frozen=True)
class PiSet:
    elements: frozenset[Path]
    generator: frozenset[Path]

    def __contains__(self, p: Path) -> bool:
        return p in self.elements

    def __iter__(self):
        return iter(sorted(self.elements))

    def __len__(self) -> int:
        return len(self.elements)

    def classes(self) -> dict[tuple, list[Path]]:
        """Group elements by (degree, source)."""
        out: dict[tuple, list[Path]] = {}
        for p in sorted(self.elements):
            out.setdefault((p.degree, p.source), []).append(p)
        return out

    def pairs(self) -> list[tuple[Path, Path]]:
        """All (lambda, mu) with equal degree and source."""
        return [(a, b) for cls in self.classes().values() for a in cls for b in cls]


def pi_closure(E: Iterable[Path]) -> PiSet:
    """Least F containing E with lambda alpha, tau beta in F whenever
    (lambda, mu), (sigma, tau) have equal degree and source and (alpha, beta)
    is a minimal common extension pair of (mu, sigma)."""
    gen = frozenset(E)
    F = set(gen)
    cache: dict[tuple[Path, Path], frozenset[MinPair]] = {}
    while True:
        classes: dict[tuple, list[Path]] = {}
        for p in F:
            classes.setdefault((p.degree, p.source), []).append(p)
        new: set[Path] = set()
        items = sorted(F)
        for mu in items:
            for sigma in items:
                key = (mu, sigma)
                if key not in cache:
                    cache[key] = lambda_min(mu, sigma)
                for pair in cache[key]:
                    g = mu.graph
                    for lam in classes[(mu.degree, mu.source)]:
                        new.add(g.compose(lam, pair.alpha))
                    for tau in classes[(sigma.degree, sigma.source)]:
                        new.add(g.compose(tau, pair.beta))
        new -= F
        if not new:
            return PiSet(frozenset(F), gen)
        F |= new


def iota_kappa(lam: Path, E) -> tuple[Path, Path]:
    """Split lam at its largest initial segment lying in the closure of E."""
    pi = E if isinstance(E, PiSet) else pi_closure(E)
    g = lam.graph
    if lam in pi:
        return lam, g.vertex(lam.source)
    hits = [p.degree for p in pi.elements
            if p.range == lam.range and dleq(p.degree, lam.degree)
            and g.prefix(lam, p.degree) == p]
    if not hits:
        return lam, g.vertex(lam.source)
    N = hits[0]
    for n in hits[1:]:
        N = djoin(N, n)
    return g.prefix(lam, N), g.segment(lam, N, lam.degree)


def prefixes_in(lam: Path, S) -> list[Path]:
    g = lam.graph
    return sorted(p for p in S if p.range == lam.range and dleq(p.degree, lam.degree)
                  and g.prefix(lam, p.degree) == p)


def tail(lam: Path, mu: Path) -> Path:
    """The alpha with lam = mu alpha (mu must be an initial segment of lam)."""
    return lam.graph.segment(lam, mu.degree, lam.degree)

