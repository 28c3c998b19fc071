import random

import pytest
from hypothesis import given, settings, strategies as st

from syzflow.cartier_flow import (FlowPencil, HiggsDatum, OverlapFn, flow_apply, flow_map,
                                  flow_on_quadratic_field, frobenius_difference, hn_sub, inverse_cartier,
                                  is_frobenius_shape, pencil_batch, taylor_cocycle, theta_prime_chart2)
from syzflow.errors import BadLambda, ConstructionError
from syzflow.fq_arith import FqElem, build_extension
from syzflow.legendre_curve import LegendreCurve
from syzflow.poly_lab import INF, Poly, RatMap
from syzflow.syz_verifier import isogeny_apply

F3, F5, F7 = (build_extension(p, 1) for p in (3, 5, 7))


# -- OverlapFn ---------------------------------------------------------------

def _rand_overlap(rng, ctx, lam):
    num = [rng.randrange(ctx.q) for _ in range(rng.randint(1, 5))]
    if not any(num):
        num[0] = 1
    return OverlapFn(ctx, lam, num, rng.randint(-2, 3), rng.randint(-2, 3), rng.randint(-2, 3))


@settings(max_examples=150, deadline=None)
@given(st.integers(0, 10**6))
def test_overlap_arithmetic_matches_pointwise(seed):
    rng = random.Random(seed)
    c = build_extension(7, 2)
    lam = 3
    f, g = _rand_overlap(rng, c, lam), _rand_overlap(rng, c, lam)
    for x in rng.sample([v for v in range(c.q) if v not in (0, 1, lam)], 5):
        fx, gx = f.eval_raw(x), g.eval_raw(x)
        assert (f + g).eval_raw(x) == c.add(fx, gx)
        assert (f - g).eval_raw(x) == c.sub(fx, gx)
        assert (f * g).eval_raw(x) == c.mul(fx, gx)
        assert (-f).eval_raw(x) == c.neg(fx)
    assert (f - f).is_zero() and f * 1 == f


def test_overlap_canonical_form_and_orders():
    # x^2 (x-1) (x-3)^2 / x^3 over F_7 with lam = 3  ->  (x-1)(x-3)^2 / x
    f = OverlapFn(F7, 3, Poly.from_roots(F7, [0, 0, 1, 3, 3]).c, 3, 0, 0)
    assert f.num == [1]
    assert f.pole_exponents == (1, -1, -2, 2)
    assert (f.ord_at(0), f.ord_at(1), f.ord_at("lam"), f.ord_at(INF)) == (-1, 1, 2, -2)
    assert f.is_unit()
    assert f * f.inverse() == OverlapFn.const(F7, 3, 1)
    with pytest.raises(ConstructionError):
        OverlapFn(F7, 3, [2, 1]).inverse()


def test_overlap_derivatives():
    # d/dx of x^5 / (x - 1) = (4 x^5 - 5 x^4) / (x - 1)^2
    f = OverlapFn(F7, 3, [0, 0, 0, 0, 0, 1], 0, 1, 0)
    expect = OverlapFn(F7, 3, [0, 0, 0, 0, -5, 4], 0, 2, 0)
    assert f.x_derivative() == expect
    assert f.log_derivative_z() == expect * OverlapFn(F7, 3, [0, 1])
    # Frobenius pullback of a constant-coefficient function is f(x^p)
    g = OverlapFn(F7, 3, [1, 2], 0, 1, 0)
    assert g.frobenius_pullback() == OverlapFn(F7, 3, [1] + [0] * 6 + [2], 0, 7, 0)
    # laurent round trip
    h = OverlapFn.laurent(F7, 3, [1, 0, 2], -2)
    assert h.laurent_coeffs() == ([1, 0, 2], -2)


# -- the Frobenius-lift cocycle ----------------------------------------------

# (w(z)^3 - w(z^3))/3 mod 3 for w = (z-1)/(z-2), expanded over Z/9 by hand:
# numerator over the denominator (z-2)^6; frozen from the independent mod-9 oracle
H_3_2_ORACLE = [1, 2, 0, 2, 0, 1]
# the same expansion for (p, lam) = (5, 3), denominator (z-3)^10
H_5_3_ORACLE = [2, 3, 2, 2, 0, 3, 0, 2, 4, 2]


def test_cocycle_p3_lambda2_matches_mod9_oracle():
    h = taylor_cocycle(3, 2)
    assert h == OverlapFn(F3, 2, H_3_2_ORACLE, 0, 0, 6)


def test_cocycle_p5_lambda3_matches_oracle_and_degree():
    h = taylor_cocycle(5, 3)
    assert h == OverlapFn(F5, 3, H_5_3_ORACLE, 0, 0, 10)
    num, den = frobenius_difference(5, [-1, 1], [-3, 1])
    assert num == H_5_3_ORACLE
    # numerator degree is 2p - 1 = p (deg A + deg B) - 1
    assert len(num) - 1 == 2 * 5 - 1
    assert den == list(Poly.from_roots(F5, [3] * 10).c)


def test_cocycle_vanishes_for_divisor_free_transition():
    for p in (3, 5, 7, 11):
        num, _ = frobenius_difference(p, [0, 1], [1])
        assert num == []


@pytest.mark.parametrize("p,lam", [(3, 2), (5, 2), (5, 3), (7, 3), (11, 7)])
def test_cocycle_lift_change_is_frobenius_pullback(p, lam):
    F = build_extension(p, 1)
    h, h2 = taylor_cocycle(p, lam), taylor_cocycle(p, lam, lift=lam + p)
    # replacing lam~ by lam~ + p shifts w(z^p) by p (z^p - 1)/(z^p - lam)^2
    delta = OverlapFn(F, lam, [p - 1], 0, -1, 2).frobenius_pullback()
    assert h2 - h == delta
    assert taylor_cocycle(p, lam, lift=lam + 2 * p) - h == delta * 2


def test_cocycle_errors():
    with pytest.raises(BadLambda):
        taylor_cocycle(5, 1)
    with pytest.raises(BadLambda):
        taylor_cocycle(5, 2, lift=3)


# -- inverse Cartier and the destabilising line --------------------------------

DATA = [(5, 2, 3), (3, 2, 0), (5, 3, INF), (7, 3, 5), (7, 4, 1), (11, 5, 7), (13, 2, 0)]


def _datum(p, lam, x0, k=1):
    if x0 is INF:
        return HiggsDatum(p, lam, INF)
    return HiggsDatum(p, lam, FqElem(build_extension(p, k), x0))


@pytest.mark.parametrize("p,lam,x0", DATA)
def test_inverse_cartier_invariants(p, lam, x0):
    V = inverse_cartier(_datum(p, lam, x0))
    inv = V.check_invariants()
    assert inv == {"det_unit": True, "degree": -p, "flat": True, "log_poles_only": True, "ok": True}


def test_inverse_cartier_degree_example_and_unipotent_twist():
    V = inverse_cartier(_datum(5, 2, 3))
    assert V.degree() == -5
    G = V.G
    twist = G[0][0] * 1 - G[0][1] * G[1][0]  # det [[1, 0], [-eta, 1]]
    assert twist == OverlapFn.const(F5, 2, 1)


@pytest.mark.parametrize("p,lam,x0,k", [(5, 2, 7, 2), (7, 3, 30, 2), (5, 3, 40, 3)])
def test_inverse_cartier_over_extensions(p, lam, x0, k):
    assert inverse_cartier(_datum(p, lam, x0, k)).check_invariants()["ok"]


@pytest.mark.parametrize("p,lam,x0", DATA)
def test_hn_sub_line(p, lam, x0):
    s = hn_sub(inverse_cartier(_datum(p, lam, x0)))
    assert s.dimension == 1
    assert s.nowhere_vanishing()
    assert s.sub_degree == (1 - p) // 2
    assert s.sub_degree + s.quotient_degree == -p


def test_theta_prime_nonzero():
    V = inverse_cartier(_datum(5, 2, 3))
    assert not theta_prime_chart2(V, hn_sub(V)).is_zero()


# -- flow_apply --------------------------------------------------------------

def test_flow_apply_examples():
    assert flow_apply(_datum(5, 2, 0)) == 0
    assert flow_apply(_datum(5, 2, INF)) is INF
    assert flow_apply(_datum(5, 2, 3)) == 3


@pytest.mark.parametrize("p,lam", [(3, 2), (5, 2), (5, 3), (7, 2), (7, 6), (11, 3), (13, 10)])
def test_branch_points_fixed(p, lam):
    for x0 in (0, 1, lam, INF):
        d = _datum(p, lam, x0)
        for method in ("cech", "pencil"):
            r = flow_apply(d, method)
            assert (r is INF) if x0 is INF else (r == x0)


@pytest.mark.parametrize("p,lam", [(5, 2), (7, 3), (11, 4)])
def test_flow_lift_invariance(p, lam):
    E = build_extension(p, 2)
    for x in random.Random(p).sample(range(E.q), 12) + [INF]:
        d = _datum(p, lam, x, 2)
        base = flow_apply(d)
        assert flow_apply(d, lift=lam + p) == base
        assert flow_apply(d, lift=lam + 3 * p) == base
        assert flow_apply(d, "pencil", lift=lam + p) == base


@pytest.mark.parametrize("p,lam,k", [(5, 2, 2), (7, 3, 2), (5, 3, 3), (3, 2, 4)])
def test_pencil_matches_cech_and_isogeny(p, lam, k):
    E = build_extension(p, k)
    for x in random.Random(p * k).sample(range(E.q), 15):
        d = _datum(p, lam, x, k)
        a = flow_apply(d, "cech")
        assert flow_apply(d, "pencil") == a
        assert isogeny_apply(p, lam, FqElem(E, x)) == a


@pytest.mark.parametrize("p,lam", [(5, 2), (7, 3), (11, 4), (11, 2)])
def test_pencil_batch_matches_scalar_path(p, lam):
    E = build_extension(p, 2)
    pen = FlowPencil.get(p, lam)
    ys = list(range(E.q))
    assert pencil_batch(pen, E, ys) == [pen.r_value(E, y) for y in ys]


def test_flow_on_quadratic_field_layout():
    vals = flow_on_quadratic_field(5, 2)
    assert len(vals) == 25 + 1 and vals[-1] is INF
    assert vals[0] == 0 and vals[1] == 1 and vals[2] == 2


# -- flow_map ----------------------------------------------------------------

def test_flow_map_supersingular_p3():
    phi = flow_map(3, 2)
    assert phi.num == Poly.monomial(F3, 9) and phi.den == Poly.const(F3, 1)


def test_flow_map_ordinary_5_3():
    phi = flow_map(5, 3)
    assert phi.degree == 25
    assert is_frobenius_shape(phi)
    assert phi(F5.elem(0)) == 0 and phi(F5.elem(1)) == 1 and phi(F5.elem(3)) == 3
    assert phi(INF) is INF


@pytest.mark.parametrize("p,lam", [(5, 2), (5, 3), (7, 3), (7, 6)])
def test_flow_map_direct_equals_structured(p, lam):
    assert flow_map(p, lam, "direct") == flow_map(p, lam, "structured")


@pytest.mark.parametrize("p,lam", [(3, 2), (5, 2), (5, 3), (7, 2), (7, 3), (11, 5), (13, 4)])
def test_flow_map_equals_multiplication_x_map(p, lam):
    phi = flow_map(p, lam)
    assert phi == LegendreCurve(build_extension(p, 1), lam).mult_x_map(p)


@pytest.mark.parametrize("p,lam", [(5, 2), (7, 4), (11, 6)])
def test_flow_map_agrees_with_flow_apply_everywhere(p, lam):
    phi = flow_map(p, lam)
    E = build_extension(p, 2)
    vals = flow_on_quadratic_field(p, lam)
    m = phi.change_ring(E)
    assert [m.eval_raw(x) for x in range(E.q)] + [m.eval_raw(INF)] == vals


def test_frobenius_shape_predicate():
    x = Poly.x(F5)
    assert is_frobenius_shape(RatMap(x**10 + 1, x**5 + 2))
    assert not is_frobenius_shape(RatMap(x**10 + x, x**5 + 2))
