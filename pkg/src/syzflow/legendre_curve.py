"""The Legendre curve C_lam : y^2 = x (x - 1) (x - lam) over a finite field.

Points are handled raw internally (``None`` for the origin, ``(x, y)`` tuples
of raw field ints) and exposed as :class:`CurvePoint`.  The x-line map
``x o [n]`` is available both pointwise (double-and-add) and as an explicit
rational function built from the division-polynomial recurrences of the
short Weierstrass model obtained by the shift x = X + (1 + lam)/3.
"""

from __future__ import annotations

import functools
import math
from dataclasses import dataclass
from typing import Optional, Union

from .errors import (BadLambda, BadTorsionOrder, DegenerateDivisionPoly,
                     NotOnCurve, NotPrime, TooLarge)
from .fq_arith import FieldCtx, FqElem, build_extension, factor_int, is_prime
from .poly_lab import (INF, FieldEmbedding, Poly, ProjPoint, RatMap,
                       p_add, p_compose, p_eval, p_mul, p_scale, p_sub,
                       rational_reconstruct_raw, roots_raw)

POINT_COUNT_LIMIT = 10**6

RawPoint = Optional[tuple]


@dataclass(frozen=True)
class CurvePoint:
    """Affine point (x, y) or the origin (``x is None``)."""

    x: Optional[FqElem] = None
    y: Optional[FqElem] = None

    @classmethod
    def infinity(cls) -> "CurvePoint":
        return cls(None, None)

    @property
    def is_infinity(self) -> bool:
        return self.x is None

    def raw(self) -> RawPoint:
        return None if self.x is None else (self.x.v, self.y.v)

    def __repr__(self) -> str:
        return "CurvePoint(INF)" if self.x is None else f"CurvePoint({self.x!r}, {self.y!r})"


INFINITY = CurvePoint.infinity()


class LegendreCurve:
    """C_lam over ``ctx``.  lam may be an int (prime field) or an FqElem."""

    def __init__(self, ctx: FieldCtx, lam: Union[int, FqElem]):
        lv = ctx.elem(lam).v
        if lv in (0, 1):
            raise BadLambda(f"lambda = {lv} is degenerate")
        self.ctx = ctx
        self.lam = lv
        self.a2 = ctx.neg(ctx.add(1, lv))
        self.a4 = lv

    def __repr__(self) -> str:
        return f"LegendreCurve(p={self.ctx.p}, k={self.ctx.k}, lam={FqElem(self.ctx, self.lam)!r})"

    def __eq__(self, other) -> bool:
        return isinstance(other, LegendreCurve) and self.ctx == other.ctx and self.lam == other.lam

    def __hash__(self) -> int:
        return hash((self.ctx, self.lam))

    @property
    def lam_elem(self) -> FqElem:
        return FqElem(self.ctx, self.lam)

    def base_change(self, big: FieldCtx, embed: Optional[FieldEmbedding] = None) -> "LegendreCurve":
        if big == self.ctx:
            return self
        if embed is None:
            embed = FieldEmbedding(self.ctx, big)
        return LegendreCurve(big, FqElem(big, embed(self.lam)))

    # -- equation ------------------------------------------------------------
    def rhs(self, x: int) -> int:
        c = self.ctx
        return c.mul(c.mul(x, c.sub(x, 1)), c.sub(x, self.lam))

    def rhs_poly(self) -> Poly:
        c = self.ctx
        return Poly.raw(c, [0, self.a4, self.a2, 1])

    def on_curve_raw(self, P: RawPoint) -> bool:
        if P is None:
            return True
        x, y = P
        return self.ctx.sqr(y) == self.rhs(x)

    def contains(self, P: CurvePoint) -> bool:
        if P.is_infinity:
            return True
        if P.x.ctx != self.ctx or P.y.ctx != self.ctx:
            return False
        return self.on_curve_raw(P.raw())

    def point(self, x, y) -> CurvePoint:
        P = CurvePoint(self.ctx.elem(x), self.ctx.elem(y))
        if not self.contains(P):
            raise NotOnCurve(f"{P} is not on {self}")
        return P

    def wrap(self, P: RawPoint) -> CurvePoint:
        if P is None:
            return INFINITY
        return CurvePoint(FqElem(self.ctx, P[0]), FqElem(self.ctx, P[1]))

    def _check(self, P: CurvePoint) -> RawPoint:
        if not self.contains(P):
            raise NotOnCurve(f"{P} is not on {self}")
        return P.raw()

    # -- group law -----------------------------------------------------------
    def add_raw(self, P: RawPoint, Q: RawPoint) -> RawPoint:
        if P is None:
            return Q
        if Q is None:
            return P
        c = self.ctx
        x1, y1 = P
        x2, y2 = Q
        if x1 == x2:
            if c.add(y1, y2) == 0:
                return None
            # tangent slope (3x^2 + 2 a2 x + a4) / 2y
            num = c.add(c.add(c.smul(3, c.sqr(x1)), c.smul(2, c.mul(self.a2, x1))), self.a4)
            s = c.div(num, c.smul(2, y1))
        else:
            s = c.div(c.sub(y2, y1), c.sub(x2, x1))
        x3 = c.sub(c.sub(c.sub(c.sqr(s), self.a2), x1), x2)
        y3 = c.sub(c.mul(s, c.sub(x1, x3)), y1)
        return (x3, y3)

    def neg_raw(self, P: RawPoint) -> RawPoint:
        return None if P is None else (P[0], self.ctx.neg(P[1]))

    def mul_raw(self, n: int, P: RawPoint) -> RawPoint:
        if n < 0:
            return self.neg_raw(self.mul_raw(-n, P))
        R: RawPoint = None
        Q = P
        while n:
            if n & 1:
                R = self.add_raw(R, Q)
            n >>= 1
            if n:
                Q = self.add_raw(Q, Q)
        return R

    def add(self, P: CurvePoint, Q: CurvePoint) -> CurvePoint:
        return self.wrap(self.add_raw(self._check(P), self._check(Q)))

    def scalar_mul(self, n: int, P: CurvePoint) -> CurvePoint:
        return self.wrap(self.mul_raw(n, self._check(P)))

    def sigma(self, P: CurvePoint) -> CurvePoint:
        return self.wrap(self.neg_raw(self._check(P)))

    def pi(self, P: CurvePoint) -> ProjPoint:
        self._check(P)
        return INF if P.is_infinity else P.x

    # -- lifting x to a point ------------------------------------------------
    def lift_x_raw(self, x: int) -> RawPoint:
        """Canonical point over ``ctx`` above x, or None-marker ``False`` if none."""
        y = self.ctx.sqrt(self.rhs(x))
        if y is None:
            return False
        return (x, y)

    # -- counting ------------------------------------------------------------
    def point_count(self) -> int:
        c = self.ctx
        if c.q > POINT_COUNT_LIMIT:
            raise TooLarge(f"field of size {c.q} is too large for exhaustive counting")
        total = 1
        half = (c.q - 1) // 2
        for x in range(c.q):
            r = self.rhs(x)
            if r == 0:
                total += 1
            elif c.pow(r, half) == 1:
                total += 2
        return total

    def all_points(self) -> list[CurvePoint]:
        c = self.ctx
        if c.q > POINT_COUNT_LIMIT:
            raise TooLarge("field too large")
        pts = [INFINITY]
        for x in range(c.q):
            y = c.sqrt(self.rhs(x))
            if y is None:
                continue
            pts.append(self.wrap((x, y)))
            if y:
                pts.append(self.wrap((x, c.neg(y))))
        return pts

    def point_order(self, P: CurvePoint, group_order: Optional[int] = None) -> int:
        R = self._check(P)
        if R is None:
            return 1
        n = self.point_count() if group_order is None else group_order
        for r, e in factor_int(n).items():
            for _ in range(e):
                if self.mul_raw(n // r, R) is None:
                    n //= r
                else:
                    break
        return n

    # -- division polynomials -----------------------------------------------
    def _short_model(self) -> tuple[int, int, int]:
        c = self.ctx
        s = c.div(c.add(1, self.lam), 3)
        A = c.sub(self.lam, c.smul(3, c.sqr(s)))
        B = c.sub(c.mul(self.lam, s), c.smul(2, c.pow(s, 3)))
        return s, A, B

    def reduced_division_polys(self, n: int) -> dict[int, list]:
        """g_i (in the shifted coordinate X) for every index needed to reach n.

        psi_i = g_i for odd i and psi_i = 2 y g_i for even i.
        """
        if self.ctx.p == 3:
            raise DegenerateDivisionPoly("characteristic 3 has no short Weierstrass shift")
        c = self.ctx
        _, A, B = self._short_model()
        F = [B, A, 0, 1]
        F2 = p_mul(c, F, F)
        F2_16 = p_scale(c, 16 % c.p, F2)
        A2 = c.sqr(A)
        memo: dict[int, list] = {
            0: [],
            1: [1],
            2: [1],
            3: [c.neg(A2), c.smul(12, B), c.smul(6, A), 0, 3],
            4: p_scale(c, 2, [c.neg(c.add(c.smul(8, c.sqr(B)), c.mul(A2, A))),
                              c.neg(c.smul(4, c.mul(A, B))), c.neg(c.smul(5, A2)),
                              c.smul(20, B), c.smul(5, A), 0, 1]),
        }
        for key in list(memo):
            memo[key] = _trim_copy(memo[key])

        def g(i: int) -> list:
            if i in memo:
                return memo[i]
            m = i // 2
            if i % 2:
                a = p_mul(c, g(m + 2), _cube(c, g(m)))
                b = p_mul(c, g(m - 1), _cube(c, g(m + 1)))
                if m % 2 == 0:
                    val = p_sub(c, p_mul(c, F2_16, a), b)
                else:
                    val = p_sub(c, a, p_mul(c, F2_16, b))
            else:
                left = p_mul(c, g(m + 2), p_mul(c, g(m - 1), g(m - 1)))
                right = p_mul(c, g(m - 2), p_mul(c, g(m + 1), g(m + 1)))
                val = p_mul(c, g(m), p_sub(c, left, right))
            memo[i] = val
            return val

        for i in range(max(0, n - 1), n + 2):
            g(i)
        return memo

    def division_poly(self, n: int) -> tuple[Poly, Poly]:
        """(g_n, factor) in the original x coordinate, with psi_n = g_n * factor,
        factor = 1 for odd n and 2y for even n (returned as the Poly 2 and a
        marker of y-dependence: the second component equals 2 when n is even)."""
        if n < 1:
            raise ValueError("n must be >= 1")
        c = self.ctx
        s, _, _ = self._short_model()
        memo = self.reduced_division_polys(n)
        back = [c.neg(s), 1]  # X = x - s
        gn = p_compose(c, memo[n], back)
        return Poly.raw(c, gn), Poly.raw(c, [2] if n % 2 == 0 else [1])

    def mult_x_map(self, n: int) -> RatMap:
        """x o [n] as a reduced rational function over ``ctx``."""
        if n < 1:
            raise ValueError("n must be >= 1")
        if n == 1:
            return RatMap.identity(self.ctx)
        if self.ctx.p == 3:
            return self._mult_x_map_interpolated(n)
        return _mult_x_map_cached(self, n)

    def _mult_x_map_psi(self, n: int) -> RatMap:
        c = self.ctx
        s, A, B = self._short_model()
        memo = self.reduced_division_polys(n)
        gm, g0, gp = memo[n - 1], memo[n], memo[n + 1]
        if not g0:
            raise DegenerateDivisionPoly(f"psi_{n} vanishes identically")
        F4 = p_scale(c, 4, [B, A, 0, 1])
        cross = p_mul(c, gm, gp)
        sq = p_mul(c, g0, g0)
        if n % 2:
            num_corr, den = p_mul(c, F4, cross), sq
        else:
            num_corr, den = cross, p_mul(c, F4, sq)
        # X o [n] = X - num_corr / den, then x = X + s
        Xs = [s, 1]
        num = p_sub(c, p_mul(c, Xs, den), num_corr)
        back = [c.neg(s), 1]
        return RatMap(Poly.raw(c, p_compose(c, num, back)), Poly.raw(c, p_compose(c, den, back)))

    def _mult_x_map_interpolated(self, n: int) -> RatMap:
        """Rational reconstruction from double-and-add samples (used for p = 3)."""
        p = self.ctx.p
        if self.ctx.k != 1:
            raise DegenerateDivisionPoly("interpolation fallback implemented over the prime field")
        need = 2 * n * n + 2
        k = 1
        while p**k // 2 < need + 8:
            k += 1
        big = build_extension(p, k)
        E = self.base_change(big)
        samples = []
        for x in range(big.q):
            P = E.lift_x_raw(x)
            if P is False:
                continue
            R = E.mul_raw(n, P)
            samples.append((x, INF if R is None else R[0]))
            if len(samples) >= need + 8:
                break
        num, den = rational_reconstruct_raw(big, samples, n * n, n * n)
        if not all(v < p for v in num + den):
            raise AssertionError("x o [n] did not descend to the base field")
        return RatMap(Poly.raw(self.ctx, num), Poly.raw(self.ctx, den), reduce=False)


def _cube(c: FieldCtx, a: list) -> list:
    return p_mul(c, a, p_mul(c, a, a))


def _trim_copy(a: list) -> list:
    a = list(a)
    while a and a[-1] == 0:
        a.pop()
    return a


@functools.lru_cache(maxsize=4096)
def _mult_x_map_cached(curve: LegendreCurve, n: int) -> RatMap:
    return curve._mult_x_map_psi(n)


# =============================================================================
# functional API
# =============================================================================

def add_points(curve: LegendreCurve, P: CurvePoint, Q: CurvePoint) -> CurvePoint:
    return curve.add(P, Q)


def involution_sigma(curve: LegendreCurve, P: CurvePoint) -> CurvePoint:
    return curve.sigma(P)


def projection_pi(curve: LegendreCurve, P: CurvePoint) -> ProjPoint:
    return curve.pi(P)


def scalar_mul(curve: LegendreCurve, n: int, P: CurvePoint) -> CurvePoint:
    return curve.scalar_mul(n, P)


def point_count(curve: LegendreCurve) -> int:
    return curve.point_count()


def point_order(curve: LegendreCurve, P: CurvePoint) -> int:
    return curve.point_order(P)


def division_poly(curve: LegendreCurve, n: int) -> tuple[Poly, Poly]:
    return curve.division_poly(n)


def mult_x_map(curve: LegendreCurve, n: int) -> RatMap:
    return curve.mult_x_map(n)


@functools.lru_cache(maxsize=None)
def hasse_poly(p: int) -> Poly:
    """H_p(lam) = sum_{i=0}^{m} C(m, i)^2 lam^i with m = (p - 1)/2, over F_p."""
    if p < 3 or not is_prime(p):
        raise NotPrime(f"{p} is not an odd prime")
    m = (p - 1) // 2
    ctx = build_extension(p, 1)
    return Poly.raw(ctx, [math.comb(m, i) ** 2 % p for i in range(m + 1)])


def is_supersingular(p: int, lam: int) -> bool:
    if lam % p in (0, 1):
        raise BadLambda(f"lambda = {lam} is degenerate mod {p}")
    return hasse_poly(p).eval_raw(lam % p) == 0


def supersingular_lambdas(p: int) -> list[int]:
    return [l for l in range(2, p) if is_supersingular(p, l)]


def strict_torsion_points(curve: LegendreCurve, N: int, k: int) -> set[CurvePoint]:
    """All points of exact order N on the base change of ``curve`` to F_{p^k}."""
    p = curve.ctx.p
    if N < 1:
        raise BadTorsionOrder("N must be positive")
    if N % p == 0:
        raise BadTorsionOrder(f"p = {p} divides N = {N}")
    if k % curve.ctx.k:
        raise BadTorsionOrder("search field must contain the curve's field")
    big = build_extension(p, k)
    E = curve.base_change(big)
    if N == 1:
        return {INFINITY}
    if N == 2:
        return {E.wrap((x, 0)) for x in (0, 1, E.lam)}
    den = curve.mult_x_map(N).den
    if curve.ctx.k == 1:
        xs = sorted(set(roots_raw(big, list(den.c))))
    else:  # pragma: no cover - extension-base curves are not used by the suite
        emb = FieldEmbedding(curve.ctx, big)
        xs = sorted(set(roots_raw(big, [emb(v) for v in den.c])))
    primes = list(factor_int(N))
    out = set()
    for x in xs:
        P = E.lift_x_raw(x)
        if P is False:
            continue
        cands = [P] if P[1] == 0 else [P, E.neg_raw(P)]
        for Q in cands:
            if E.mul_raw(N, Q) is not None:
                continue
            if any(E.mul_raw(N // r, Q) is None for r in primes):
                continue
            out.add(E.wrap(Q))
    return out
