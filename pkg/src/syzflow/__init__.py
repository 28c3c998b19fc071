"""Flow-versus-isogeny verification on the Legendre family over finite fields.

Modules
-------
fq_arith        finite fields F_{p^k}, Witt vectors of length 2
poly_lab        polynomials, rational maps, factoring, determinants, reconstruction
legendre_curve  the curves y^2 = x(x-1)(x-lam), torsion, Hasse polynomial
cartier_flow    inverse Cartier transform, destabilising line, the flow map
syz_verifier    Hankel determinants, structural formula, route agreement, orbits
periodic_census Carmichael exponents, periods, periodic-point counts
cli             the ``syzflow`` command
"""

from .errors import *  # noqa: F401,F403
from .fq_arith import FieldCtx, FqElem, W2Int, build_extension, frobenius, is_prime, prime_field, sqrt_in_field
from .poly_lab import INF, Poly, RatMap, bareiss_det, rational_reconstruct, roots_in_field
from .legendre_curve import CurvePoint, LegendreCurve, hasse_poly, is_supersingular, supersingular_lambdas
from .cartier_flow import HiggsDatum, OverlapFn, flow_apply, flow_map, inverse_cartier, hn_sub, taylor_cocycle
from .syz_verifier import (check_detA_factorization, check_detB, det_A, det_A_at, hilbert_const,
                           isogeny_apply, orbit_analysis, structural_decompose, sweep, verify_conjecture)
from .periodic_census import (WeightTuple, Z, carmichael, count_M_alpha, lambda_prime, phi2,
                              preimage_lambda_prime, Lambda_alpha)

__version__ = "0.1.0"
