import random

import pytest

from syzflow.errors import BadLambda, BadTorsionOrder, NotOnCurve, NotPrime
from syzflow.fq_arith import build_extension
from syzflow.legendre_curve import (INFINITY, LegendreCurve, add_points, hasse_poly, involution_sigma,
                                    is_supersingular, point_count, projection_pi, scalar_mul,
                                    strict_torsion_points, supersingular_lambdas)
from syzflow.poly_lab import INF, Poly, RatMap

F5 = build_extension(5, 1)
C2 = LegendreCurve(F5, 2)
P31 = C2.point(3, 1)

CURVES = [(3, 1, 2), (5, 1, 2), (5, 1, 3), (7, 1, 3), (5, 2, 2), (7, 2, 4), (3, 3, 2), (11, 1, 5)]


def _curve(p, k, lam):
    return LegendreCurve(build_extension(p, k), lam)


# -- examples --------------------------------------------------------------

def test_group_examples():
    assert add_points(C2, P31, INFINITY) == P31
    assert add_points(C2, P31, involution_sigma(C2, P31)) == INFINITY
    assert add_points(C2, P31, P31) == C2.point(1, 0)


def test_sigma_pi_examples():
    assert involution_sigma(C2, INFINITY) == INFINITY
    assert projection_pi(C2, P31) == 3
    assert projection_pi(C2, INFINITY) is INF
    fixed = {P for P in C2.all_points() if C2.sigma(P) == P}
    assert fixed == {INFINITY, C2.point(0, 0), C2.point(1, 0), C2.point(2, 0)}
    assert all(C2.scalar_mul(2, P) == INFINITY for P in fixed)


def test_scalar_mul_examples():
    assert scalar_mul(C2, 2, P31) == C2.point(1, 0)
    assert scalar_mul(C2, 4, P31) == INFINITY
    assert scalar_mul(C2, 5, P31) == P31
    assert scalar_mul(C2, 0, P31) == INFINITY
    assert scalar_mul(C2, -3, P31) == C2.sigma(C2.scalar_mul(3, P31))


def test_counts_and_orders():
    assert point_count(LegendreCurve(build_extension(3, 1), 2)) == 4
    assert C2.point_order(P31) == 4
    assert all(C2.point_order(C2.point(x, 0)) == 2 for x in (0, 1, 2))


def test_errors():
    with pytest.raises(NotOnCurve):
        C2.point(3, 2)
    with pytest.raises(BadLambda):
        LegendreCurve(F5, 1)
    with pytest.raises(BadLambda):
        LegendreCurve(F5, 0)
    with pytest.raises(BadTorsionOrder):
        strict_torsion_points(C2, 5, 2)
    with pytest.raises(NotPrime):
        hasse_poly(9)


def test_strict_torsion_examples():
    assert strict_torsion_points(C2, 1, 2) == {INFINITY}
    two = strict_torsion_points(C2, 2, 2)
    assert len(two) == 3 and all(P.y == 0 for P in two)
    # E[3] of C_2/F_5 becomes rational over F_{5^8} (Frobenius has order 8 on E[3])
    assert len(strict_torsion_points(C2, 3, 4)) == 0
    S = strict_torsion_points(C2, 3, 8)
    assert len(S) == 8
    # E[3] has exactly 8 nonzero points, so 8 distinct points killed by 3 are all of them
    E8 = C2.base_change(build_extension(5, 8))
    assert all(P != INFINITY and E8.scalar_mul(3, P) == INFINITY for P in S)
    # #C_2(F_{5^k}) = 5^k + 1 - (a^k + b^k), a + b = 5 + 1 - 8, ab = 5
    s = [2, -2]
    for _ in range(2, 9):
        s.append(-2 * s[-1] - 5 * s[-2])
    counts = [5**k + 1 - s[k] for k in range(1, 9)]
    assert counts[0] == 8 and all(counts[k - 1] % 3 for k in (1, 2, 3)) and counts[7] % 9 == 0


def test_strict_torsion_full_count_matches_phi2():
    from syzflow.periodic_census import phi2
    # over F_{5^2}: #C_2 = 32 = 2^5 contains the full 4-torsion
    assert len(strict_torsion_points(C2, 4, 2)) == phi2(4)


def test_hasse_examples():
    assert hasse_poly(3) == Poly(build_extension(3, 1), [1, 1])
    assert is_supersingular(3, 2)
    assert hasse_poly(5) == Poly(F5, [1, 4, 1])
    assert all(hasse_poly(p).deg == (p - 1) // 2 for p in (3, 5, 7, 11, 13, 101))


@pytest.mark.parametrize("p", [3, 5, 7, 11, 13, 17, 19, 23])
def test_supersingular_iff_point_count(p):
    F = build_extension(p, 1)
    by_count = [l for l in range(2, p) if LegendreCurve(F, l).point_count() == p + 1]
    assert supersingular_lambdas(p) == by_count


def test_mult_x_map_examples():
    assert C2.mult_x_map(1) == RatMap.identity(F5)
    assert C2.mult_x_map(2)(F5.elem(3)) == 1
    assert C2.mult_x_map(2).degree == 4


def test_mult_x_map_three_pointwise_over_f25():
    F25 = build_extension(5, 2)
    E = LegendreCurve(F25, 2)
    m = C2.mult_x_map(3).change_ring(F25)
    checked = 0
    for x in range(F25.q):  # all 25 elements
        P = E.lift_x_raw(x)
        if P is False:
            continue
        R = E.mul_raw(3, P)
        assert m.eval_raw(x) == (INF if R is None else R[0])
        checked += 1
    assert checked >= 10


@pytest.mark.parametrize("p,lam,n", [(5, 2, 3), (7, 3, 2), (7, 3, 5), (11, 4, 3), (13, 5, 4), (3, 2, 2), (3, 2, 4)])
def test_mult_x_map_degree_and_pointwise(p, lam, n):
    F = build_extension(p, 1)
    m = LegendreCurve(F, lam).mult_x_map(n)
    assert m.degree == n * n
    big = build_extension(p, 2)
    E = LegendreCurve(big, lam)
    mb = m.change_ring(big)
    for x in range(0, big.q, max(1, big.q // 60)):
        P = E.lift_x_raw(x)
        if P is False:
            continue
        R = E.mul_raw(n, P)
        assert mb.eval_raw(x) == (INF if R is None else R[0])


@pytest.mark.parametrize("p", [3, 5, 7, 11])
def test_mult_x_map_for_p_matches_double_and_add(p):
    F = build_extension(p, 1)
    for lam in range(2, p):
        m = LegendreCurve(F, lam).mult_x_map(p)
        big = build_extension(p, 2)
        E = LegendreCurve(big, lam)
        mb = m.change_ring(big)
        for x in range(0, big.q, max(1, big.q // 40)):
            P = E.lift_x_raw(x)
            if P is False:
                continue
            R = E.mul_raw(p, P)
            assert mb.eval_raw(x) == (INF if R is None else R[0])


@pytest.mark.parametrize("p,lam,n,m", [(5, 2, 2, 3), (7, 3, 2, 2), (11, 4, 3, 2), (13, 6, 2, 5)])
def test_mult_x_map_composition(p, lam, n, m):
    F = build_extension(p, 1)
    E = LegendreCurve(F, lam)
    big = build_extension(p, 2)
    a = E.mult_x_map(n * m).change_ring(big)
    b = E.mult_x_map(n).compose(E.mult_x_map(m)).change_ring(big)
    assert E.mult_x_map(n).compose(E.mult_x_map(m)) == E.mult_x_map(n * m)
    for x in range(0, big.q, 7):
        assert a.eval_raw(x) == b.eval_raw(x)


# -- properties --------------------------------------------------------------

@pytest.mark.parametrize("p,k,lam", CURVES)
def test_group_law_properties(p, k, lam):
    E = _curve(p, k, lam)
    pts = E.all_points()
    rng = random.Random(p * 100 + k * 10 + lam)
    for _ in range(200):
        P, Q, R = (rng.choice(pts) for _ in range(3))
        assert E.add(E.add(P, Q), R) == E.add(P, E.add(Q, R))
        assert E.add(P, Q) == E.add(Q, P)
        assert E.add(P, E.sigma(P)) == INFINITY
        assert E.contains(E.add(P, Q))


@pytest.mark.parametrize("p,k,lam", CURVES + [(3, 5, 2), (13, 2, 7), (31, 2, 3)])
def test_hasse_bound(p, k, lam):
    E = _curve(p, k, lam)
    q = E.ctx.q
    n = E.point_count()
    assert (n - (q + 1)) ** 2 <= 4 * q
    assert n % 4 == 0  # full 2-torsion is rational


@pytest.mark.parametrize("p,k,lam", CURVES)
def test_projection_fibres(p, k, lam):
    E = _curve(p, k, lam)
    fib = {}
    for P in E.all_points():
        assert E.pi(E.sigma(P)) == E.pi(P)
        key = E.pi(P)
        fib.setdefault(INF if key is INF else key.v, set()).add(P)
    branch = {INF, 0, 1, E.lam}
    for x, pts in fib.items():
        assert len(pts) == (1 if x in branch else 2)


@pytest.mark.parametrize("p,k,lam", CURVES[:5])
def test_point_order_divides_count(p, k, lam):
    E = _curve(p, k, lam)
    n = E.point_count()
    for P in E.all_points():
        o = E.point_order(P, n)
        assert n % o == 0 and E.scalar_mul(o, P) == INFINITY
        assert all(E.scalar_mul(o // r, P) != INFINITY for r in (2, 3, 5, 7, 11, 13) if o % r == 0)


def test_strict_torsion_counts_agree_with_brute_orders():
    F = build_extension(7, 1)
    E1 = LegendreCurve(F, 3)
    big = build_extension(7, 2)
    E = E1.base_change(big)
    n = E.point_count()
    pts = E.all_points()
    for N in (3, 4, 6, 8):
        if n % N:
            continue
        brute = {P for P in pts if E.point_order(P, n) == N}
        assert strict_torsion_points(E1, N, 2) == brute
