import cmath
import itertools
import math
import random

import numpy as np
import pytest

from kgraphlab import (build_family, commutation_check, conditional_expectation, core_blocks,
                       gap_projection, gauge_unitary, induced_subgraph_family, omega_ladder,
                       pi_closure, rotation_cocycle, theta_unit, trivial_cocycle, verify_tck,
                       vee_closure)
from kgraphlab.cocycle import load_table_cocycle, table_cocycle
from kgraphlab.errors import BoundTooSmall, NotDSCompatible, NotHereditary
from kgraphlab.kgraph import compose, dleq, dsub
from kgraphlab.operators import SparseOperator, residual
from kgraphlab.toeplitz import (block_orthogonality_residual, ext_identity_residual,
                                gauge_average, inclusion_check, orthogonal_sum_residual,
                                product_formula_residual, range_sum_residual,
                                refinement_terms, tail_identity_residual, theta_forms_residual)

from conftest import fixture_path
from test_cocycle import coboundary


def dense_T(g, c, D, lam):
    """T_lam built straight from its defining action on basis vectors."""
    basis = g.paths_up_to(D)
    idx = {p: i for i, p in enumerate(basis)}
    M = np.zeros((len(basis), len(basis)), dtype=complex)
    for a in basis:
        if a.range == lam.source:
            la = compose(lam, a)
            if la in idx:
                M[idx[la], idx[a]] = c(lam, a)
    return M


@pytest.mark.parametrize("theta", [0.0, 0.3])
def test_operator_matches_definition(fix_a, theta):
    c = rotation_cocycle(fix_a, theta)
    fam = build_family(fix_a, c, (3, 3), (1, 1))
    for lam in fix_a.paths_up_to((1, 1)):
        assert np.array_equal(fam.T(lam).to_dense(), dense_T(fix_a, c, (3, 3), lam))


def test_bound_checks(fix_a):
    with pytest.raises(BoundTooSmall):
        build_family(fix_a, trivial_cocycle(fix_a), (1, 1), (2, 0))
    with pytest.raises(BoundTooSmall):
        build_family(fix_a, trivial_cocycle(fix_a), (1,), (0,))


def test_tck_cube_tables(cube):
    for c in (load_table_cocycle(cube, fixture_path("cube_bichar.json")),
              coboundary(cube, (2, 2, 1), seed=5)):
        rep = verify_tck(build_family(cube, c, (2, 2, 1), (1, 1, 0)))
        assert rep.passed, rep.to_dict()


def test_tck_detects_bad_cocycle(fix_a):
    c = load_table_cocycle(fix_a, fixture_path("fault_cocycle_a.json"), validate=False)
    rep = verify_tck(build_family(fix_a, c, (3, 3), (1, 1)))
    assert not rep.get("TCK2").passed
    assert rep.get("TCK2").witness is not None


def test_product_formula(cube):
    c = coboundary(cube, (2, 2, 1), seed=2)
    fam = build_family(cube, c, (2, 2, 1), (1, 1, 0))
    gens = cube.paths_up_to((1, 0, 0)) + cube.paths_of_degree((0, 1, 0))
    rng = random.Random(0)
    for _ in range(40):
        mu, nu, eta, zeta = (rng.choice(gens) for _ in range(4))
        assert product_formula_residual(fam, mu, nu, eta, zeta) <= 1e-10


@pytest.mark.parametrize("theta", [0.0, 0.25, 0.5, 0.3])
def test_commutation(fix_a, theta):
    fam = build_family(fix_a, rotation_cocycle(fix_a, theta), (3, 3), (1, 1))
    rho = commutation_check(fam)
    assert abs(rho - cmath.exp(-2j * math.pi * theta)) <= 1e-12


# ---------------------------------------------------------------- projections

def test_orthogonalisation(fix_a, fix_b, cube):
    fa = build_family(fix_a, rotation_cocycle(fix_a, 0.3), (3, 3), (1, 1))
    fb = build_family(fix_b, trivial_cocycle(fix_b), (4,), (1,))
    fc = build_family(cube, coboundary(cube, (2, 2, 1), 1), (2, 2, 1), (1, 1, 0))
    for fam, gens in ((fa, "v,e,f"), (fb, "v,a"), (fc, "v,a1,b2")):
        g = fam.graph
        E = vee_closure(g.parse_paths(gens))
        assert orthogonal_sum_residual(fam, E) <= 1e-10
        for mu in E:
            assert range_sum_residual(fam, mu, E) <= 1e-10


def test_gap_identities(cube):
    fam = build_family(cube, coboundary(cube, (2, 2, 1), 4), (2, 2, 1), (1, 1, 0))
    E = cube.parse_paths("a1,b1.c2")
    for mu in cube.paths_up_to((1, 1, 0)):
        assert ext_identity_residual(fam, E, mu) <= 1e-10
    for lam in cube.paths_up_to((1, 0, 0)):
        assert tail_identity_residual(fam, lam, cube.parse_paths("b1,c1")) <= 1e-10


def test_gap_projection_is_projection(cube):
    fam = build_family(cube, trivial_cocycle(cube), (2, 2, 1), (1, 1, 0))
    Q = gap_projection(fam, cube.parse_paths("a1,b2"))
    cols = fam.cols()
    assert residual(Q @ Q, Q, cols) <= 1e-12
    assert residual(Q.adjoint(), Q, cols) <= 1e-12


# ---------------------------------------------------------------- matrix units

def _rank_oracle(fam, pi):
    """Dimension of span{Theta_{l,m}} restricted to the interior, by numeric rank."""
    cols = list(fam.cols())
    vecs = [theta_unit(fam, a, b, pi).to_dense()[:, cols].ravel() for a, b in pi.pairs()]
    return int(np.linalg.matrix_rank(np.array(vecs), tol=1e-9)) if vecs else 0


@pytest.mark.parametrize("graph,gens,cocycle", [
    ("fix_a", "e,f", "rot"), ("fix_a", "v,e,f", "rot"),
    ("cube", "a1,a2", "cob"), ("cube", "a1,a2,b1.c1", "cob"), ("cube", "v,b1,b2", "cob")])
def test_core_blocks(graph, gens, cocycle, request):
    g = request.getfixturevalue(graph)
    c = rotation_cocycle(g, 0.3) if cocycle == "rot" else coboundary(g, (2, 2, 1), 7)
    D, M = ((3, 3), (1, 1)) if g.k == 2 else ((2, 2, 1), (0, 0, 0))
    fam = build_family(g, c, D, M)
    pi = pi_closure(g.parse_paths(gens))
    blocks = core_blocks(fam, pi)
    for b in blocks:
        assert b.m1_residual <= 1e-12 and b.m2_residual <= 1e-12
    assert block_orthogonality_residual(fam, blocks) <= 1e-12
    for lam, mu in pi.pairs():
        assert theta_forms_residual(fam, lam, mu, pi) <= 1e-12
    # independent grouping of the closure by degree and source
    groups = {}
    for p in pi.elements:
        groups.setdefault((p.degree, p.source), set()).add(p)
    assert {(b.n, b.v): set(b.members) for b in blocks} == groups
    assert _rank_oracle(fam, pi) == sum(b.size ** 2 for b in blocks if not b.zero)


def test_theta_requires_ds_pair(fix_a):
    fam = build_family(fix_a, trivial_cocycle(fix_a), (2, 2), (0, 0))
    pi = pi_closure(fix_a.parse_paths("e,f"))
    with pytest.raises(NotDSCompatible):
        theta_unit(fam, fix_a.edge("e"), fix_a.edge("f"), pi)


# ---------------------------------------------------------------- ladder

def test_ladder_fix_a(fix_a):
    chain = [fix_a.parse_paths(x) for x in ("v", "v,e", "v,e,f")]
    c = rotation_cocycle(fix_a, 0.3)
    rep = omega_ladder(fix_a, trivial_cocycle(fix_a), c, chain, (3, 3), (1, 1))
    assert rep.passed
    assert rep.get("commuting-square").max_residual <= 1e-10
    same = omega_ladder(fix_a, c, c, chain, (3, 3), (1, 1))
    assert same.info["omega_identically_one"]


def test_ladder_nontrivial_phases(cube):
    c = coboundary(cube, (2, 2, 1), 5)
    b = trivial_cocycle(cube)
    chain = [cube.parse_paths(x) for x in ("v,a1,a2", "v,a1,a2,b1,b2,c1")]
    rep = omega_ladder(cube, b, c, chain, (2, 2, 1), (0, 0, 0))
    assert rep.passed
    assert not rep.info["omega_identically_one"]
    assert omega_ladder(cube, c, c, chain, (2, 2, 1), (0, 0, 0)).info["omega_identically_one"]
    # without the phase correction the square does not commute
    famC = build_family(cube, c, (2, 2, 1), (0, 0, 0))
    small, big = (pi_closure(E) for E in chain)
    worst = 0.0
    for lam, mu in small.pairs():
        lhs = sum((z * theta_unit(famC, x, y, big)
                   for z, x, y in refinement_terms(b, lam, mu, small, big)),
                  SparseOperator.zero(famC.dim))
        worst = max(worst, residual(lhs, theta_unit(famC, lam, mu, small), famC.cols()))
    assert worst > 1e-3


def test_inclusion_both_cocycles(cube):
    famB = build_family(cube, trivial_cocycle(cube), (2, 2, 1), (0, 0, 0))
    famC = build_family(cube, coboundary(cube, (2, 2, 1), 9), (2, 2, 1), (0, 0, 0))
    rep = inclusion_check(famB, famC, cube.parse_paths("a1,b1"), cube.parse_paths("a1,b1,c2"))
    assert rep.passed


# ---------------------------------------------------------------- gauge action

def _random_operator(space, rng, nnz=12):
    entries = {}
    for _ in range(nnz):
        i, j = rng.randrange(space.dim), rng.randrange(space.dim)
        entries[(i, j)] = complex(rng.uniform(-1, 1), rng.uniform(-1, 1))
    return SparseOperator(space.dim, entries)


def test_gauge_unitary_and_expectation(cube):
    fam = build_family(cube, trivial_cocycle(cube), (2, 2, 1), (0, 0, 0))
    z = [cmath.exp(2j * math.pi * t) for t in (0.1, 0.35, 0.7)]
    U = gauge_unitary(fam.space, z)
    ident = SparseOperator.diagonal(fam.dim, {i: 1 for i in range(fam.dim)})
    assert residual(U @ U.adjoint(), ident) <= 1e-12
    # gauge covariance of the generators
    for lam in cube.paths_up_to((1, 1, 1)):
        phase = np.prod([zj ** d for zj, d in zip(z, lam.degree)])
        assert residual(U @ fam.T(lam) @ U.adjoint(), fam.T(lam) * phase) <= 1e-12
    rng = random.Random(3)
    for _ in range(5):
        A = _random_operator(fam.space, rng)
        assert residual(gauge_average(fam.space, A, grid=3), conditional_expectation(fam.space, A)) <= 1e-8


def test_induced_family(fix_c):
    fam = build_family(fix_c, trivial_cocycle(fix_c), (2,), (1,))
    with pytest.raises(NotHereditary):
        induced_subgraph_family(fam, ["u"])
    ind = induced_subgraph_family(fam, ["v"])
    assert ind.Tv("v").max_abs() == 0 and ind.Tv("u").max_abs() == 1
    assert ind.T(fix_c.edge("g")).max_abs() == 0
    assert verify_tck(ind).passed
