"""Computational toolkit for twisted relative Cuntz-Krieger theory of finite k-graphs."""

from .alignment import (MinPair, PiSet, check_finitely_aligned, ext, iota_kappa, lambda_min,
                        mce, mce_of_set, pi_closure, vee_closure)
from .cocycle import (Cocycle, check_cocycle_identity, restrict, rotation_cocycle,
                      table_cocycle, trivial_cocycle)
from .ideals import (BoundaryPrefix, IdealPair, boundary_prefix_witness, e_sub_h,
                     enumerate_ideal_pairs, hereditary_closure, is_saturated_relative,
                     quotient_graph)
from .kgraph import (KGraph, Path, build_kgraph, compose, load_kgraph, parse_kgraph, paths_of_degree,
                     paths_up_to, segment, validate_kgraph)
from .satiation import (FESet, SatiationResult, enumerate_fe, is_exhaustive, is_satiated,
                        satiate, sigma)
from .toeplitz import (ToeplitzFamily, build_family, commutation_check, conditional_expectation,
                       core_blocks, gap_projection, gauge_unitary, induced_subgraph_family,
                       inclusion_check, omega_ladder, q_lambda, theta_unit, verify_tck)

__version__ = "0.1.0"
