"""The twisted Toeplitz representation on a truncated path space and the
finite-dimensional structures it carries: gap projections, orthogonalised
range projections, matrix units of the core, the phase-corrected inclusion
ladder, and the gauge action.

All identities are checked on columns xi_alpha whose degree leaves room for
every creation operator in the expression, so truncation never interferes.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from itertools import product
from typing import Iterable, Sequence

from .alignment import PiSet, iota_kappa, lambda_min, mce, pi_closure
from .cocycle import Cocycle, PHASE_TOL, _rotation_shape, unit_phase
from .errors import BoundTooSmall, MixedRange, NoScalarRelation, NotDSCompatible, NotHereditary
from .kgraph import Degree, KGraph, Path, dadd, dleq, dsub, dzero
from .operators import SparseOperator, TruncatedSpace, residual, total

REL_TOL = 1e-10


class ToeplitzFamily:
    """Operators T_lambda xi_alpha = c(lambda, alpha) xi_{lambda alpha}, truncated at D.

    Generators whose source lies in ``killed`` are replaced by zero; this is how
    the family induced on a quotient by a hereditary set is realised.
    """

    def __init__(self, space: TruncatedSpace, cocycle: Cocycle, killed: frozenset[str] = frozenset()):
        self.space = space
        self.graph = space.graph
        self.cocycle = cocycle
        self.killed = frozenset(killed)
        self._T: dict[Path, SparseOperator] = {}
        self._Ts: dict[Path, SparseOperator] = {}
        self._P: dict[Path, SparseOperator] = {}
        self._theta: dict = {}

    @property
    def dim(self) -> int:
        return self.space.dim

    def T(self, lam: Path) -> SparseOperator:
        op = self._T.get(lam)
        if op is None:
            entries = {}
            if lam.source not in self.killed and dleq(lam.degree, self.space.D):
                g, idx, c = self.graph, self.space.index, self.cocycle
                top = dsub(self.space.D, lam.degree)
                for a in self.space.basis:
                    if a.range == lam.source and dleq(a.degree, top):
                        entries[(idx[g.compose(lam, a)], idx[a])] = c(lam, a)
            op = SparseOperator(self.dim, entries)
            self._T[lam] = op
        return op

    def Tstar(self, lam: Path) -> SparseOperator:
        op = self._Ts.get(lam)
        if op is None:
            op = self._Ts[lam] = self.T(lam).adjoint()
        return op

    def proj(self, lam: Path) -> SparseOperator:
        """The range projection T_lam T_lam*."""
        op = self._P.get(lam)
        if op is None:
            op = self._P[lam] = self.T(lam) @ self.Tstar(lam)
        return op

    def Tv(self, v: str) -> SparseOperator:
        return self.T(self.graph.vertex(v))

    def generators(self) -> tuple[Path, ...]:
        return self.graph.paths_up_to(self.space.margin)

    def cols(self, extra: Sequence[int] | None = None) -> tuple[int, ...]:
        """Safe interior for the family margin, optionally widened by an expression degree."""
        if extra is None:
            return self.space.interior()
        return self.space.interior(extra)


def build_family(g: KGraph, c: Cocycle, D: Sequence[int], M: Sequence[int]) -> ToeplitzFamily:
    D, M = tuple(D), tuple(M)
    if len(D) != g.k or len(M) != g.k:
        raise BoundTooSmall(f"bound and margin need {g.k} coordinates")
    if not dleq(M, D):
        raise BoundTooSmall(f"margin {M} exceeds bound {D}")
    fam = ToeplitzFamily(TruncatedSpace(g, D, M), c)
    for lam in g.paths_up_to(M):
        fam.T(lam)
    return fam


# ---------------------------------------------------------------- relations

@dataclass
class RelationResult:
    relation: str
    max_residual: float
    instances: int
    tol: float
    witness: list | None = None

    @property
    def passed(self) -> bool:
        return self.max_residual <= self.tol

    def to_dict(self) -> dict:
        return {"relation": self.relation, "max_residual": self.max_residual,
                "instances": self.instances, "pass": self.passed, "witness": self.witness}


@dataclass
class Report:
    results: list[RelationResult] = field(default_factory=list)
    info: dict = field(default_factory=dict)

    @property
    def passed(self) -> bool:
        return all(r.passed for r in self.results)

    def get(self, relation: str) -> RelationResult:
        return next(r for r in self.results if r.relation == relation)

    def max_residual(self) -> float:
        return max((r.max_residual for r in self.results), default=0.0)

    def to_dict(self) -> dict:
        return {"pass": self.passed, "relations": [r.to_dict() for r in self.results], **self.info}


class _Tracker:
    def __init__(self, name: str, tol: float):
        self.name, self.tol = name, tol
        self.worst, self.count, self.witness = 0.0, 0, None

    def add(self, res: float, witness) -> None:
        self.count += 1
        if res > self.worst:
            self.worst = res
            if res > self.tol or self.witness is None:
                self.witness = witness

    def result(self) -> RelationResult:
        return RelationResult(self.name, self.worst, self.count, self.tol,
                              self.witness if self.worst > self.tol else None)


def verify_tck(fam: ToeplitzFamily, tol: float = REL_TOL) -> Report:
    """(TCK1)-(TCK4) and the adjoint-product expansion for all generators of degree <= margin."""
    g = fam.graph
    gens = fam.generators()
    D = fam.space.D

    def cols(*paths: Path):
        deg = dzero(g.k)
        for p in paths:
            deg = dadd(deg, p.degree)
        return fam.space.interior(deg)

    t1 = _Tracker("TCK1", 0.0)
    allcols = fam.space.interior(dzero(g.k))
    for v in g.vertices:
        Tv = fam.Tv(v)
        bad = max((abs(z - 1) if i == j else abs(z) for (i, j), z in Tv.entries.items()), default=0.0)
        t1.add(bad, [v])
        for w in g.vertices:
            want = Tv if v == w else SparseOperator.zero(fam.dim)
            t1.add(residual(Tv @ fam.Tv(w), want, allcols), [v, w])

    t2 = _Tracker("TCK2", tol)
    t3 = _Tracker("TCK3", tol)
    t4 = _Tracker("TCK4", tol)
    t5 = _Tracker("adjoint-product", tol)
    for mu in gens:
        t3.add(residual(fam.Tstar(mu) @ fam.T(mu), fam.Tv(mu.source), cols(mu)), [mu.label])
        for nu in gens:
            if mu.source == nu.range and dleq(dadd(mu.degree, nu.degree), D):
                lhs = fam.T(mu) @ fam.T(nu)
                rhs = fam.cocycle(mu, nu) * fam.T(g.compose(mu, nu))
                t2.add(residual(lhs, rhs, cols(mu, nu)), [mu.label, nu.label])
            if mu.range != nu.range:
                continue
            lhs = fam.proj(mu) @ fam.proj(nu)
            rhs = total((fam.proj(lam) for lam in sorted(mce(mu, nu))), fam.dim)
            t4.add(residual(lhs, rhs, cols(mu, nu)), [mu.label, nu.label])
            lhs = fam.Tstar(mu) @ fam.T(nu)
            rhs = total((fam.cocycle(mu, p.alpha).conjugate() * fam.cocycle(nu, p.beta)
                         * (fam.T(p.alpha) @ fam.Tstar(p.beta))
                         for p in sorted(lambda_min(mu, nu))), fam.dim)
            t5.add(residual(lhs, rhs, cols(mu, nu)), [mu.label, nu.label])
    rep = Report([t.result() for t in (t1, t2, t3, t4, t5)])
    rep.info = {"bound": list(D), "margin": list(fam.space.margin), "dim": fam.dim,
                "cocycle": fam.cocycle.describe(), "killed": sorted(fam.killed)}
    return rep


def product_formula_residual(fam: ToeplitzFamily, mu: Path, nu: Path, eta: Path, zeta: Path) -> float:
    """Residual of the expansion of t_mu t_nu* t_eta t_zeta* as a sum over minimal pairs."""
    g, c = fam.graph, fam.cocycle
    lhs = fam.T(mu) @ fam.Tstar(nu) @ fam.T(eta) @ fam.Tstar(zeta)
    terms = []
    for p in sorted(lambda_min(nu, eta)):
        a, b = p.alpha, p.beta
        coef = c(eta, b) * c(mu, a) * c(nu, a).conjugate() * c(zeta, b).conjugate()
        terms.append(coef * (fam.T(g.compose(mu, a)) @ fam.Tstar(g.compose(zeta, b))))
    deg = dadd(mu.degree, eta.degree)
    return residual(lhs, total(terms, fam.dim), fam.space.interior(deg))


def commutation_check(fam: ToeplitzFamily, tol: float = 1e-12) -> complex:
    """The scalar rho with T_e T_f = rho T_f T_e on the one-vertex 2-graph."""
    e_id, f_id = _rotation_shape(fam.graph)
    e, f = fam.graph.edge(e_id), fam.graph.edge(f_id)
    cols = set(fam.space.interior(dadd(e.degree, f.degree)))
    A = (fam.T(e) @ fam.T(f)).restrict_columns(cols)
    B = (fam.T(f) @ fam.T(e)).restrict_columns(cols)
    if not B.entries:
        raise NoScalarRelation("T_f T_e vanishes on the safe interior")
    ratios = [A.entries.get(k, 0) / z for k, z in sorted(B.entries.items())]
    rho = ratios[0]
    for k in set(A.entries) - set(B.entries):
        if abs(A.entries[k]) > tol:
            raise NoScalarRelation("T_e T_f has entries where T_f T_e has none", witness=list(k))
    for r in ratios:
        if abs(r - rho) > tol:
            raise NoScalarRelation(f"entry ratios {rho} and {r} disagree")
    return rho


# ---------------------------------------------------------------- projections

def _common_range(E: Iterable[Path]) -> str | None:
    rs = {p.range for p in E}
    if len(rs) > 1:
        raise MixedRange(f"elements have ranges {sorted(rs)}", witness=sorted(rs))
    return next(iter(rs), None)


def gap_projection(fam: ToeplitzFamily, E: Iterable[Path], vertex: str | None = None) -> SparseOperator:
    """prod over lambda in E of (T_v - T_lambda T_lambda*), v the common range.

    Factors are multiplied in canonical order; for empty E the vertex must be given.
    """
    E = sorted(set(E))
    v = _common_range(E) or vertex
    if v is None:
        raise MixedRange("empty set needs an explicit vertex")
    if vertex is not None and v != vertex:
        raise MixedRange(f"set has range {v}, not {vertex}")
    Tv = fam.Tv(v)
    out = Tv
    for lam in E:
        out = out @ (Tv - fam.proj(lam))
    return out


def proper_extensions_in(lam: Path, E: Iterable[Path]) -> list[Path]:
    g = lam.graph
    return sorted(p for p in set(E) if p != lam and g.has_prefix(p, lam))


def q_lambda(fam: ToeplitzFamily, lam: Path, E: Iterable[Path]) -> SparseOperator:
    P = fam.proj(lam)
    out = P
    for mu in proper_extensions_in(lam, E):
        out = out @ (P - fam.proj(mu))
    return out


def orthogonal_sum_residual(fam: ToeplitzFamily, E: Iterable[Path]) -> float:
    """|| sum_{lambda in E} Q_lambda^E - t_v || for E containing its range v."""
    E = sorted(set(E))
    v = _common_range(E)
    s = total((q_lambda(fam, lam, E) for lam in E), fam.dim)
    return residual(s, fam.Tv(v), fam.cols())


def range_sum_residual(fam: ToeplitzFamily, mu: Path, E: Iterable[Path]) -> float:
    """|| t_mu t_mu* - sum_{mu nu in E} Q_{mu nu}^E || for E closed under MCE."""
    E = sorted(set(E))
    g = fam.graph
    s = total((q_lambda(fam, p, E) for p in E if g.has_prefix(p, mu)), fam.dim)
    return residual(fam.proj(mu), s, fam.cols())


def ext_identity_residual(fam: ToeplitzFamily, E: Iterable[Path], mu: Path) -> float:
    """|| Q^E t_mu - t_mu Q^{Ext(mu;E)} || for mu in r(E) Lambda."""
    from .alignment import ext
    E = sorted(set(E))
    lhs = gap_projection(fam, E) @ fam.T(mu)
    rhs = fam.T(mu) @ gap_projection(fam, ext(mu, E), vertex=mu.source)
    return residual(lhs, rhs, fam.space.interior(mu.degree))


def tail_identity_residual(fam: ToeplitzFamily, lam: Path, E: Iterable[Path]) -> float:
    """|| t_v - t_l t_l* - (t_v prod_{nu in E}(t_v - t_{l nu} t_{l nu}*) - t_l Q^E t_l*) ||."""
    g = fam.graph
    E = sorted(set(E))
    Tv = fam.Tv(lam.range)
    prod = Tv
    for nu in E:
        prod = prod @ (Tv - fam.proj(g.compose(lam, nu)))
    rhs = prod - fam.T(lam) @ gap_projection(fam, E, vertex=lam.source) @ fam.Tstar(lam)
    return residual(Tv - fam.proj(lam), rhs, fam.space.interior(lam.degree))


# ---------------------------------------------------------------- matrix units

def _check_ds(lam: Path, mu: Path, pi: PiSet) -> None:
    if lam not in pi or mu not in pi or lam.degree != mu.degree or lam.source != mu.source:
        raise NotDSCompatible(f"({lam.label}, {mu.label}) is not a pair of closure elements "
                              "with equal degree and source", witness=[lam.label, mu.label])


def theta_unit(fam: ToeplitzFamily, lam: Path, mu: Path, pi: PiSet) -> SparseOperator:
    _check_ds(lam, mu, pi)
    key = (lam, mu, pi.elements)
    op = fam._theta.get(key)
    if op is None:
        op = fam._theta[key] = q_lambda(fam, lam, pi.elements) @ fam.T(lam) @ fam.Tstar(mu)
    return op


def theta_forms_residual(fam: ToeplitzFamily, lam: Path, mu: Path, pi: PiSet) -> float:
    """Agreement of the three expressions for the matrix unit."""
    g = fam.graph
    first = theta_unit(fam, lam, mu, pi)
    Ts = fam.Tv(lam.source)
    mid = Ts
    for p in proper_extensions_in(lam, pi.elements):
        mid = mid @ (Ts - fam.proj(g.segment(p, lam.degree, p.degree)))
    second = fam.T(lam) @ mid @ fam.Tstar(mu)
    third = fam.T(lam) @ fam.Tstar(mu) @ q_lambda(fam, mu, pi.elements)
    cols = fam.cols()
    return max(residual(first, second, cols), residual(first, third, cols))


def tail_set(pi: PiSet, lam: Path) -> list[Path]:
    """Nonvertex nu with lam nu in the closure."""
    g = lam.graph
    return [g.segment(p, lam.degree, p.degree) for p in proper_extensions_in(lam, pi.elements)]


@dataclass
class CoreBlock:
    n: Degree
    v: str
    members: tuple[Path, ...]
    matrix_units: dict[tuple[Path, Path], SparseOperator]
    zero: bool
    m1_residual: float
    m2_residual: float

    @property
    def size(self) -> int:
        return len(self.members)

    def to_dict(self) -> dict:
        return {"n": list(self.n), "v": self.v, "members": [p.label for p in self.members],
                "size": self.size, "zero": self.zero,
                "m1_residual": self.m1_residual, "m2_residual": self.m2_residual}


def core_blocks(fam: ToeplitzFamily, pi: PiSet, tol: float = 1e-12) -> list[CoreBlock]:
    cols = fam.cols()
    out = []
    for (n, v), members in sorted(pi.classes().items(), key=lambda kv: (kv[0][0], kv[0][1])):
        units = {(a, b): theta_unit(fam, a, b, pi) for a in members for b in members}
        Tv = fam.Tv(v)
        gap = Tv
        for nu in tail_set(pi, members[0]):
            gap = gap @ (Tv - fam.proj(nu))
        zero = gap.max_abs(cols) <= tol
        m1 = max(residual(units[(a, b)].adjoint(), units[(b, a)], cols)
                 for a in members for b in members)
        m2 = 0.0
        for (a, b), x in units.items():
            for (s, t), y in units.items():
                want = units[(a, t)] if b == s else SparseOperator.zero(fam.dim)
                m2 = max(m2, residual(x @ y, want, cols))
        out.append(CoreBlock(n, v, tuple(members), units, zero, m1, m2))
    return out


def block_orthogonality_residual(fam: ToeplitzFamily, blocks: list[CoreBlock]) -> float:
    cols = fam.cols()
    worst = 0.0
    for i, A in enumerate(blocks):
        for j, B in enumerate(blocks):
            if i == j:
                continue
            for x in A.matrix_units.values():
                for y in B.matrix_units.values():
                    worst = max(worst, (x @ y).max_abs(cols))
    return worst


# ---------------------------------------------------------------- inclusions and the ladder

def refinement_terms(c: Cocycle, lam: Path, mu: Path, small: PiSet, big: PiSet):
    """Terms (coefficient, lam nu, mu nu) expressing a small-level unit at the big level."""
    g = lam.graph
    out = []
    for p in sorted(big.elements):
        if not g.has_prefix(p, lam):
            continue
        if iota_kappa(p, small)[0] != lam:
            continue
        nu = g.segment(p, lam.degree, p.degree)
        out.append((c(lam, nu) * c(mu, nu).conjugate(), p, g.compose(mu, nu)))
    return out


def inclusion_residual(fam: ToeplitzFamily, E: Iterable[Path], G: Iterable[Path]) -> RelationResult:
    small, big = pi_closure(E), pi_closure(G)
    tr = _Tracker("inclusion", REL_TOL)
    cols = fam.cols()
    for lam, mu in small.pairs():
        rhs = total((z * theta_unit(fam, a, b, big)
                     for z, a, b in refinement_terms(fam.cocycle, lam, mu, small, big)), fam.dim)
        tr.add(residual(theta_unit(fam, lam, mu, small), rhs, cols), [lam.label, mu.label])
    return tr.result()


def inclusion_check(famB: ToeplitzFamily, famC: ToeplitzFamily, E, G) -> Report:
    out = []
    for name, fam in (("b", famB), ("c", famC)):
        r = inclusion_residual(fam, E, G)
        r.relation = f"inclusion[{name}]"
        out.append(r)
    return Report(out)


class Omega:
    """The phase corrections omega_i, defined on all pairs by recursion on i."""

    def __init__(self, b: Cocycle, c: Cocycle, pis: list[PiSet]):
        self.b, self.c, self.pis = b, c, pis
        self._memo: dict = {}

    def __call__(self, i: int, lam: Path, mu: Path) -> complex:
        if i == 0:
            return 1 + 0j
        key = (i, lam, mu)
        hit = self._memo.get(key)
        if hit is None:
            pi = self.pis[i - 1]
            il, kl = iota_kappa(lam, pi)
            im, km = iota_kappa(mu, pi)
            b, c = self.b, self.c
            hit = (self(i - 1, il, im) * b(im, km) * c(il, kl)
                   * (b(il, kl) * c(im, km)).conjugate())
            self._memo[key] = hit
        return hit


def omega_ladder(g: KGraph, b: Cocycle, c: Cocycle, chain: Sequence[Iterable[Path]],
                 D: Sequence[int], M: Sequence[int], tol: float = REL_TOL) -> Report:
    famB = build_family(g, b, D, M)
    famC = build_family(g, c, D, M)
    pis = [pi_closure(E) for E in chain]
    omega = Omega(b, c, pis)
    cols = famC.cols()
    square = _Tracker("commuting-square", tol)
    incl_b = _Tracker("inclusion[b]", tol)
    hom = _Tracker("omega-homomorphism", tol)
    diag = _Tracker("omega-diagonal", PHASE_TOL)
    tables = []
    for i, pi in enumerate(pis):
        table = {}
        for lam, mu in pi.pairs():
            w = omega(i, lam, mu)
            table[(lam, mu)] = w
            if lam == mu:
                diag.add(abs(w - 1), [i, lam.label])
        tables.append(table)
        # psi_i must respect the matrix-unit relations
        for (lam, mu), w in table.items():
            for (s, t), w2 in table.items():
                if lam.degree != s.degree:
                    continue
                lhs = (w * theta_unit(famC, lam, mu, pi)) @ (w2 * theta_unit(famC, s, t, pi))
                want = (table[(lam, t)] * theta_unit(famC, lam, t, pi)
                        if mu == s else SparseOperator.zero(famC.dim))
                hom.add(residual(lhs, want, cols), [i, lam.label, mu.label, s.label, t.label])
    for i in range(len(pis) - 1):
        small, big = pis[i], pis[i + 1]
        for lam, mu in small.pairs():
            terms_b = refinement_terms(b, lam, mu, small, big)
            lhs = total((z * omega(i + 1, a, bb) * theta_unit(famC, a, bb, big)
                         for z, a, bb in terms_b), famC.dim)
            rhs = omega(i, lam, mu) * theta_unit(famC, lam, mu, small)
            square.add(residual(lhs, rhs, cols), [i, lam.label, mu.label])
            rb = total((z * theta_unit(famB, a, bb, big) for z, a, bb in terms_b), famB.dim)
            incl_b.add(residual(theta_unit(famB, lam, mu, small), rb, cols), [i, lam.label, mu.label])
    rep = Report([square.result(), incl_b.result(), hom.result(), diag.result()])
    trivial = all(abs(w - 1) <= PHASE_TOL for t in tables for w in t.values())
    rep.info = {
        "chain": [[p.label for p in sorted(E)] for E in chain],
        "omega_identically_one": trivial,
        "omega": [[[lam.label, mu.label, w.real, w.imag]
                   for (lam, mu), w in sorted(t.items(), key=lambda kv: (kv[0][0].key, kv[0][1].key))]
                  for t in tables],
    }
    rep.omega_tables = tables
    return rep


# ---------------------------------------------------------------- gauge action

def gauge_unitary(space: TruncatedSpace, z: Sequence[complex]) -> SparseOperator:
    vals = {}
    for i, p in enumerate(space.basis):
        w = 1 + 0j
        for zj, dj in zip(z, p.degree):
            w *= zj ** dj
        vals[i] = w
    return SparseOperator.diagonal(space.dim, vals)


def conditional_expectation(space: TruncatedSpace, A: SparseOperator) -> SparseOperator:
    """Keep exactly the entries (beta, alpha) with d(beta) = d(alpha)."""
    deg = space.degree_of
    return SparseOperator(A.dim, {(i, j): v for (i, j), v in A.entries.items() if deg(i) == deg(j)})


def gauge_average(space: TruncatedSpace, A: SparseOperator, grid: int = 5) -> SparseOperator:
    """Average of U_z A U_z* over z in the grid of grid-th roots of unity in each coordinate."""
    k = space.graph.k
    roots = [unit_phase(j / grid) for j in range(grid)]
    acc = SparseOperator.zero(A.dim)
    count = 0
    for z in product(roots, repeat=k):
        U = gauge_unitary(space, z)
        acc = acc + U @ A @ U.adjoint()
        count += 1
    return acc * (1 / count)


# ---------------------------------------------------------------- quotients

def induced_subgraph_family(fam: ToeplitzFamily, H: Iterable[str]) -> ToeplitzFamily:
    H = frozenset(H)
    reach = fam.graph.reachable_from(H)
    if not reach <= H:
        raise NotHereditary(f"{sorted(reach - H)} reachable from H but not in H",
                            witness=sorted(reach - H))
    out = ToeplitzFamily(fam.space, fam.cocycle, fam.killed | H)
    return out
