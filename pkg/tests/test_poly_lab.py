import itertools
import random

import pytest
from hypothesis import given, settings, strategies as st

from syzflow.errors import BadSamples, DivisionByZero, NoInterpolant, ShapeError, ZeroPolynomial
from syzflow.fq_arith import FqElem, build_extension
from syzflow.legendre_curve import LegendreCurve
from syzflow.poly_lab import (INF, FieldEmbedding, Poly, PolyMatrix, RatMap, bareiss_det, cofactor_det,
                              det_by_evaluation, distinct_degree_factorization, nullspace, poly_ops,
                              rational_reconstruct, roots_in_field, squarefree_decomposition)

F5, F7 = build_extension(5, 1), build_extension(7, 1)


def P(ctx, *cs):
    return Poly(ctx, cs)


# -- examples --------------------------------------------------------------

def test_gcd_example():
    assert P(F5, -1, 0, 1).gcd(P(F5, -1, 1)) == P(F5, -1, 1)


def test_divrem_example():
    q, r = P(F7, 0, 0, 0, 1).divrem(P(F7, -1, 1))
    assert q == P(F7, 1, 1, 1) and r == P(F7, 1)


def test_derivative_of_x_to_the_p():
    for p in (3, 5, 7):
        F = build_extension(p, 1)
        assert Poly.monomial(F, p).derivative().is_zero()


def test_divrem_by_zero():
    with pytest.raises(DivisionByZero):
        P(F5, 1, 1).divrem(Poly(F5))


def test_poly_ops_bundle():
    out = poly_ops(P(F5, -1, 0, 1), P(F5, -1, 1))
    assert out["divrem"] == (P(F5, 1, 1), Poly(F5))
    assert out["gcd"] == P(F5, -1, 1)
    assert out["mul"] == P(F5, 1, -1, -1, 1)


def test_roots_examples():
    assert [r.v for r in roots_in_field(P(F5, -1, 0, 1))] == [1, 4]
    assert roots_in_field(P(F5, -2, 0, 1)) == []
    assert [r.v for r in roots_in_field(P(F7, 9, -6, 1))] == [3, 3]
    with pytest.raises(ZeroPolynomial):
        roots_in_field(Poly(F5))


def test_roots_over_extension_of_prime_polynomial():
    F25 = build_extension(5, 2)
    rs = roots_in_field(P(F5, -2, 0, 1), F25)
    assert len(rs) == 2 and all(r * r == 2 for r in rs)


def test_bareiss_examples():
    x = Poly.x(F5)
    one = Poly.const(F5, 1)
    assert bareiss_det(PolyMatrix([[x, one], [one, x]])) == x * x - 1
    F3 = build_extension(3, 1)
    lam = Poly.x(F3)
    assert bareiss_det(PolyMatrix([[lam - lam**3]])) == lam - lam**3
    I3 = [[Poly.const(F5, int(i == j)) for j in range(3)] for i in range(3)]
    assert bareiss_det(PolyMatrix(I3)) == Poly.const(F5, 1)


def test_bareiss_shape_errors():
    x = Poly.x(F5)
    with pytest.raises(ShapeError):
        bareiss_det(PolyMatrix([[x, x]]))
    with pytest.raises(ShapeError):
        PolyMatrix([[x, x], [x]])


def test_bareiss_needs_pivoting():
    z, o = Poly(F5), Poly.const(F5, 1)
    x = Poly.x(F5)
    M = PolyMatrix([[z, o, x], [o, z, o], [x, o, z]])
    assert bareiss_det(M) == cofactor_det(M)


def _leibniz(rows, ctx):
    n = len(rows)
    out = Poly(ctx)
    for perm in itertools.permutations(range(n)):
        inv = sum(1 for i in range(n) for j in range(i + 1, n) if perm[i] > perm[j])
        term = Poly.const(ctx, -1 if inv % 2 else 1)
        for i, j in enumerate(perm):
            term = term * rows[i][j]
        out = out + term
    return out


polys_f7 = st.lists(st.integers(0, 6), max_size=4).map(lambda cs: Poly(F7, cs))


@settings(max_examples=150, deadline=None)
@given(st.integers(1, 4).flatmap(lambda n: st.lists(st.lists(polys_f7, min_size=n, max_size=n),
                                                      min_size=n, max_size=n)))
def test_bareiss_vs_cofactor_and_leibniz(rows):
    M = PolyMatrix(rows, F7)
    d = bareiss_det(M)
    assert d == cofactor_det(M)
    assert d == _leibniz(rows, F7)


@settings(max_examples=300, deadline=None)
@given(polys_f7, polys_f7)
def test_divrem_recombines(f, g):
    if g.is_zero():
        return
    q, r = f.divrem(g)
    assert q * g + r == f
    assert r.deg < g.deg


@settings(max_examples=300, deadline=None)
@given(polys_f7, polys_f7)
def test_gcd_divides_both_and_is_monic(f, g):
    if f.is_zero() and g.is_zero():
        return
    d = f.gcd(g)
    assert d.lead == 1
    assert f.divrem(d)[1].is_zero() and g.divrem(d)[1].is_zero()


@settings(max_examples=200, deadline=None)
@given(polys_f7, polys_f7, st.integers(0, 6))
def test_eval_is_ring_homomorphism(f, g, x):
    assert (f * g).eval_raw(x) == F7.mul(f.eval_raw(x), g.eval_raw(x))
    assert (f + g).eval_raw(x) == F7.add(f.eval_raw(x), g.eval_raw(x))
    if not f.is_zero() and not g.is_zero():
        assert (f * g).deg == f.deg + g.deg


@settings(max_examples=200, deadline=None)
@given(polys_f7)
def test_roots_bounded_and_exact(f):
    if f.is_zero():
        return
    rs = roots_in_field(f)
    assert len(rs) <= f.deg
    brute = {x for x in range(7) if f.eval_raw(x) == 0}
    assert {r.v for r in rs} == brute
    prod = Poly.from_roots(F7, rs)
    assert f.divrem(prod)[1].is_zero()


def test_squarefree_and_distinct_degree():
    x = Poly.x(F5)
    f = (x - 1) ** 3 * (x * x + 2) ** 2 * (x - 3)
    sq = squarefree_decomposition(F5, list(f.c))
    assert sorted(e for _, e in sq) == [1, 2, 3]
    dd = distinct_degree_factorization(F5, list(((x - 1) * (x * x + 2) * (x**3 + x + 1)).c))
    assert [d for d, _ in dd] == [1, 2, 3]


def test_nullspace():
    rows = [[1, 2, 3], [2, 4, 6]]
    ker = nullspace(F7, rows, 3)
    assert len(ker) == 2
    for v in ker:
        assert all(sum(a * b for a, b in zip(r, v)) % 7 == 0 for r in rows)


def test_field_embedding_roundtrip():
    small, big = build_extension(3, 2), build_extension(3, 4)
    emb = FieldEmbedding(small, big)
    for a in range(small.q):
        for b in range(small.q):
            assert emb(small.mul(a, b)) == big.mul(emb(a), emb(b))
        assert emb.preimage(emb(a)) == a


# -- rational maps and reconstruction ----------------------------------------

def test_ratmap_normalisation_and_evaluation():
    x = Poly.x(F7)
    m = RatMap(x * (x - 1) * 3, (x - 1) * 2)
    assert m.num == x * 5 and m.den == Poly.const(F7, 1)
    inv = RatMap(Poly.const(F7, 1), x)
    assert inv(F7.elem(0)) is INF and inv(INF) == 0 and inv(F7.elem(3)) == 5
    assert RatMap(x).compose(inv) == inv


def test_reconstruct_square_map():
    samples = [(F7.elem(v), F7.elem(v * v)) for v in range(7)]
    m = rational_reconstruct(samples, 2, 0)
    assert m.num == Poly.monomial(F7, 2) and m.den == Poly.const(F7, 1)


def test_reconstruct_inverse_with_pole():
    samples = [(F7.elem(0), INF)] + [(F7.elem(v), F7.elem(pow(v, -1, 7))) for v in range(1, 7)]
    m = rational_reconstruct(samples, 1, 1)
    assert m.num == Poly.const(F7, 1) and m.den == Poly.x(F7)


def test_reconstruct_multiplication_by_three_from_double_and_add():
    F125 = build_extension(5, 3)
    E = LegendreCurve(F125, 2)
    samples = []
    for x in range(40):
        Pt = E.lift_x_raw(x)
        if Pt is False:
            continue
        R = E.mul_raw(3, Pt)
        samples.append((x, INF if R is None else R[0]))
    m = rational_reconstruct(samples, 9, 9, ctx=F125)
    ref = LegendreCurve(F5, 2).mult_x_map(3).change_ring(F125)
    assert m == RatMap(ref.num, ref.den)


def test_reconstruct_errors():
    with pytest.raises(BadSamples):
        rational_reconstruct([(F7.elem(1), F7.elem(1))] * 4, 1, 1)
    with pytest.raises(BadSamples):
        rational_reconstruct([(F7.elem(1), F7.elem(1))], 1, 1)
    # x^3 is not of bidegree (1, 1)
    with pytest.raises(NoInterpolant):
        rational_reconstruct([(F7.elem(v), F7.elem(v**3)) for v in range(7)], 1, 1)


@pytest.mark.parametrize("seed", range(25))
def test_reconstruct_roundtrip_random(seed):
    rng = random.Random(seed)
    F = build_extension(rng.choice([7, 11, 13]), 2)
    dn, dd = rng.randint(0, 4), rng.randint(0, 4)
    num = Poly.raw(F, [rng.randrange(F.q) for _ in range(dn)] + [rng.randrange(1, F.q)])
    den = Poly.raw(F, [rng.randrange(F.q) for _ in range(dd)] + [1])
    m = RatMap(num, den)
    xs = rng.sample(range(F.q), 2 * 8 + 2)
    samples = [(x, m.eval_raw(x)) for x in xs]
    # 18 samples pin down any map of bidegree <= (8, 8), so loose bounds work too
    assert rational_reconstruct(samples, 8, 8, ctx=F) == m
    assert rational_reconstruct(samples, max(m.num.deg, 0), m.den.deg, ctx=F) == m


def test_det_by_evaluation_matches_bareiss():
    import numpy as np
    p = 7
    F = build_extension(p, 1)
    lam = Poly.x(F)
    ents = [[lam**2 + 1, lam * 3], [lam - 2, lam**3]]
    sym = bareiss_det(PolyMatrix(ents))

    def values(l0, l1):
        from syzflow.poly_lab import _QuadArrays
        Q = _QuadArrays(build_extension(p, 2))

        def ev(f):
            a0, a1 = np.zeros_like(l0), np.zeros_like(l0)
            for c in reversed(f.c):
                a0, a1 = Q.mul(a0, a1, l0, l1)
                a0 = (a0 + c) % p
            return a0, a1
        out0 = np.stack([np.stack([ev(e)[0] for e in row], -1) for row in ents], -2)
        out1 = np.stack([np.stack([ev(e)[1] for e in row], -1) for row in ents], -2)
        return out0, out1

    assert det_by_evaluation(p, values, 2, sym.deg) == sym
