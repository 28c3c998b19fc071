"""Dense univariate polynomials, rational maps and matrices over a ``FieldCtx``.

Two layers again: list-level kernels (``p_*`` functions) that take the field
context explicitly and operate on lists of raw field ints (low -> high, no
trailing zeros), and the ``Poly`` / ``RatMap`` / ``PolyMatrix`` value types.

Over a prime field the kernels switch to numpy int64 convolution / long
division once operands are large enough for it to pay off; the overflow bound
``n * (p-1)**2 < 2**62`` is checked before doing so.
"""

from __future__ import annotations

import itertools
from typing import Callable, Iterable, Optional, Sequence, Union

import numpy as np

from .errors import (BadSamples, CtxMismatch, DivisionByZero, NoInterpolant,
                     ShapeError, ZeroPolynomial)
from .fq_arith import FieldCtx, FqElem, build_extension, factor_int

RawPoly = list  # list[int], normalised (no trailing zeros)

_NP_MUL_MIN = 24
_NP_DIV_MIN = 24


class _Infinity:
    """The point at infinity of P^1 (singleton)."""

    _inst = None

    def __new__(cls):
        if cls._inst is None:
            cls._inst = super().__new__(cls)
        return cls._inst

    def __repr__(self) -> str:
        return "INF"

    def __reduce__(self):
        return (_Infinity, ())


INF = _Infinity()
ProjPoint = Union[FqElem, _Infinity]


# =============================================================================
# list-level kernels
# =============================================================================

def trim(a: list) -> list:
    while a and a[-1] == 0:
        a.pop()
    return a


def _np_ok(ctx: FieldCtx, n: int) -> bool:
    return ctx.k == 1 and n * (ctx.p - 1) ** 2 < (1 << 62)


def p_add(ctx: FieldCtx, a: RawPoly, b: RawPoly) -> RawPoly:
    if len(a) < len(b):
        a, b = b, a
    out = list(a)
    add = ctx.add
    for i, y in enumerate(b):
        out[i] = add(out[i], y)
    return trim(out)


def p_neg(ctx: FieldCtx, a: RawPoly) -> RawPoly:
    neg = ctx.neg
    return [neg(x) for x in a]


def p_sub(ctx: FieldCtx, a: RawPoly, b: RawPoly) -> RawPoly:
    out = list(a) + [0] * max(0, len(b) - len(a))
    sub = ctx.sub
    for i, y in enumerate(b):
        out[i] = sub(out[i], y)
    return trim(out)


def p_scale(ctx: FieldCtx, c: int, a: RawPoly) -> RawPoly:
    if c == 0:
        return []
    if c == 1:
        return list(a)
    if ctx.k == 1:
        p = ctx.p
        return [c * x % p for x in a]
    mul = ctx.mul
    return [mul(c, x) for x in a]


def p_shift(a: RawPoly, n: int) -> RawPoly:
    """Multiply by x^n (n >= 0) or drop the lowest -n coefficients (n < 0)."""
    if not a:
        return []
    if n >= 0:
        return [0] * n + list(a)
    return trim(list(a[-n:]))


def p_mul(ctx: FieldCtx, a: RawPoly, b: RawPoly) -> RawPoly:
    if not a or not b:
        return []
    la, lb = len(a), len(b)
    if ctx.k == 1:
        p = ctx.p
        if min(la, lb) >= _NP_MUL_MIN and _np_ok(ctx, min(la, lb)):
            r = np.convolve(np.asarray(a, dtype=np.int64), np.asarray(b, dtype=np.int64)) % p
            return trim(r.tolist())
        out = [0] * (la + lb - 1)
        for i, x in enumerate(a):
            if x:
                for j, y in enumerate(b):
                    out[i + j] += x * y
        return trim([c % p for c in out])
    mul, add = ctx.mul, ctx.add
    out = [0] * (la + lb - 1)
    for i, x in enumerate(a):
        if x:
            for j, y in enumerate(b):
                if y:
                    out[i + j] = add(out[i + j], mul(x, y))
    return trim(out)


def p_divrem(ctx: FieldCtx, a: RawPoly, b: RawPoly) -> tuple[RawPoly, RawPoly]:
    if not b:
        raise DivisionByZero("division by the zero polynomial")
    db = len(b) - 1
    if len(a) <= db:
        return [], list(a)
    inv = ctx.inv(b[-1])
    nq = len(a) - db
    if ctx.k == 1:
        p = ctx.p
        if db >= _NP_DIV_MIN and nq >= 4:
            r = np.asarray(a, dtype=np.int64)
            bb = np.asarray(b, dtype=np.int64)
            q = np.zeros(nq, dtype=np.int64)
            for i in range(nq - 1, -1, -1):
                c = int(r[i + db]) * inv % p
                q[i] = c
                if c:
                    seg = r[i:i + db + 1]
                    seg -= c * bb
                    seg %= p
            return trim(q.tolist()), trim(r[:db].tolist())
        r = list(a)
        q = [0] * nq
        for i in range(nq - 1, -1, -1):
            c = r[i + db] * inv % p
            q[i] = c
            if c:
                for j in range(db):
                    r[i + j] = (r[i + j] - c * b[j]) % p
            r[i + db] = 0
        return trim(q), trim(r[:db])
    mul, sub = ctx.mul, ctx.sub
    r = list(a)
    q = [0] * nq
    for i in range(nq - 1, -1, -1):
        c = mul(r[i + db], inv)
        q[i] = c
        if c:
            for j in range(db):
                if b[j]:
                    r[i + j] = sub(r[i + j], mul(c, b[j]))
        r[i + db] = 0
    return trim(q), trim(r[:db])


def p_mod(ctx: FieldCtx, a: RawPoly, b: RawPoly) -> RawPoly:
    return p_divrem(ctx, a, b)[1]


def p_exact_div(ctx: FieldCtx, a: RawPoly, b: RawPoly) -> RawPoly:
    q, r = p_divrem(ctx, a, b)
    if r:
        raise ArithmeticError("inexact polynomial division")
    return q


def p_monic(ctx: FieldCtx, a: RawPoly) -> RawPoly:
    if not a:
        return []
    return p_scale(ctx, ctx.inv(a[-1]), a)


def p_gcd(ctx: FieldCtx, a: RawPoly, b: RawPoly) -> RawPoly:
    a, b = list(a), list(b)
    while b:
        a, b = b, p_mod(ctx, a, b)
    return p_monic(ctx, a)


def p_xgcd(ctx: FieldCtx, a: RawPoly, b: RawPoly) -> tuple[RawPoly, RawPoly, RawPoly]:
    """(g, s, t) with s a + t b = g monic."""
    r0, r1 = list(a), list(b)
    s0, s1 = [1], []
    t0, t1 = [], [1]
    while r1:
        q, r = p_divrem(ctx, r0, r1)
        r0, r1 = r1, r
        s0, s1 = s1, p_sub(ctx, s0, p_mul(ctx, q, s1))
        t0, t1 = t1, p_sub(ctx, t0, p_mul(ctx, q, t1))
    if not r0:
        return [], s0, t0
    c = ctx.inv(r0[-1])
    return p_scale(ctx, c, r0), p_scale(ctx, c, s0), p_scale(ctx, c, t0)


def p_invmod(ctx: FieldCtx, a: RawPoly, m: RawPoly) -> RawPoly:
    g, s, _ = p_xgcd(ctx, a, m)
    if g != [1]:
        raise DivisionByZero("polynomial not invertible modulo m")
    return p_mod(ctx, s, m)


def p_eval(ctx: FieldCtx, a: RawPoly, x: int) -> int:
    if ctx.k == 1:
        p = ctx.p
        y = 0
        for c in reversed(a):
            y = (y * x + c) % p
        return y
    mul, add = ctx.mul, ctx.add
    y = 0
    for c in reversed(a):
        y = add(mul(y, x), c)
    return y


def p_deriv(ctx: FieldCtx, a: RawPoly) -> RawPoly:
    return trim([ctx.smul(i, a[i]) for i in range(1, len(a))])


def p_powmod(ctx: FieldCtx, base: RawPoly, e: int, m: RawPoly) -> RawPoly:
    result = [1] if len(m) > 1 else []
    base = p_mod(ctx, base, m)
    while e:
        if e & 1:
            result = p_mod(ctx, p_mul(ctx, result, base), m)
        e >>= 1
        if e:
            base = p_mod(ctx, p_mul(ctx, base, base), m)
    return result


def p_pow(ctx: FieldCtx, base: RawPoly, e: int) -> RawPoly:
    result: RawPoly = [1]
    while e:
        if e & 1:
            result = p_mul(ctx, result, base)
        e >>= 1
        if e:
            base = p_mul(ctx, base, base)
    return result


def p_compose(ctx: FieldCtx, a: RawPoly, b: RawPoly) -> RawPoly:
    """a(b(x)) by Horner."""
    out: RawPoly = []
    for c in reversed(a):
        out = p_add(ctx, p_mul(ctx, out, b), [c] if c else [])
    return out


def p_inflate(a: RawPoly, n: int) -> RawPoly:
    """a(x^n)."""
    if not a:
        return []
    out = [0] * ((len(a) - 1) * n + 1)
    out[::n] = a
    return out


def p_from_roots(ctx: FieldCtx, roots: Iterable[int]) -> RawPoly:
    out: RawPoly = [1]
    for r in roots:
        out = p_mul(ctx, out, [ctx.neg(r), 1])
    return out


def p_valuation(a: RawPoly) -> int:
    """Order of vanishing at 0 (a != 0)."""
    for i, c in enumerate(a):
        if c:
            return i
    raise ZeroPolynomial("valuation of the zero polynomial")


# =============================================================================
# value types
# =============================================================================

def _coerce_coeff(ctx: FieldCtx, c) -> int:
    if isinstance(c, FqElem):
        if c.ctx != ctx:
            raise CtxMismatch("coefficient from another field")
        return c.v
    return ctx.scalar(int(c))


class Poly:
    """A dense polynomial over ``ctx``; immutable."""

    __slots__ = ("ctx", "c")

    def __init__(self, ctx: FieldCtx, coeffs: Iterable = ()):
        self.ctx = ctx
        self.c = tuple(trim([_coerce_coeff(ctx, x) for x in coeffs]))

    @classmethod
    def raw(cls, ctx: FieldCtx, coeffs: Sequence[int]) -> "Poly":
        obj = object.__new__(cls)
        obj.ctx = ctx
        c = list(coeffs)
        trim(c)
        obj.c = tuple(c)
        return obj

    @classmethod
    def x(cls, ctx: FieldCtx) -> "Poly":
        return cls.raw(ctx, [0, 1])

    @classmethod
    def const(cls, ctx: FieldCtx, c) -> "Poly":
        return cls.raw(ctx, [_coerce_coeff(ctx, c)])

    @classmethod
    def monomial(cls, ctx: FieldCtx, n: int, c=1) -> "Poly":
        return cls.raw(ctx, [0] * n + [_coerce_coeff(ctx, c)])

    @classmethod
    def from_roots(cls, ctx: FieldCtx, roots) -> "Poly":
        return cls.raw(ctx, p_from_roots(ctx, [_coerce_coeff(ctx, r) for r in roots]))

    # -- basics -------------------------------------------------------------
    @property
    def deg(self) -> int:
        """Degree; -1 for the zero polynomial."""
        return len(self.c) - 1

    def degree(self) -> int:
        return self.deg

    @property
    def lead(self) -> FqElem:
        return FqElem(self.ctx, self.c[-1] if self.c else 0)

    def coeff(self, i: int) -> FqElem:
        return FqElem(self.ctx, self.c[i] if 0 <= i < len(self.c) else 0)

    def coeffs(self) -> list[FqElem]:
        return [FqElem(self.ctx, v) for v in self.c]

    def is_zero(self) -> bool:
        return not self.c

    def __bool__(self) -> bool:
        return bool(self.c)

    def _other(self, g) -> RawPoly:
        if isinstance(g, Poly):
            if g.ctx is not self.ctx and g.ctx != self.ctx:
                raise CtxMismatch("polynomials over different fields")
            return list(g.c)
        if isinstance(g, (int, FqElem)):
            v = _coerce_coeff(self.ctx, g)
            return [v] if v else []
        return NotImplemented

    def _w(self, c: RawPoly) -> "Poly":
        return Poly.raw(self.ctx, c)

    def __add__(self, g):
        o = self._other(g)
        return NotImplemented if o is NotImplemented else self._w(p_add(self.ctx, list(self.c), o))

    __radd__ = __add__

    def __sub__(self, g):
        o = self._other(g)
        return NotImplemented if o is NotImplemented else self._w(p_sub(self.ctx, list(self.c), o))

    def __rsub__(self, g):
        o = self._other(g)
        return NotImplemented if o is NotImplemented else self._w(p_sub(self.ctx, o, list(self.c)))

    def __neg__(self):
        return self._w(p_neg(self.ctx, list(self.c)))

    def __mul__(self, g):
        o = self._other(g)
        return NotImplemented if o is NotImplemented else self._w(p_mul(self.ctx, list(self.c), o))

    __rmul__ = __mul__

    def __pow__(self, e: int):
        if e < 0:
            raise ValueError("negative exponent")
        return self._w(p_pow(self.ctx, list(self.c), e))

    def divrem(self, g: "Poly") -> tuple["Poly", "Poly"]:
        q, r = p_divrem(self.ctx, list(self.c), self._other(g))
        return self._w(q), self._w(r)

    def __divmod__(self, g):
        return self.divrem(g)

    def __floordiv__(self, g):
        return self.divrem(g)[0]

    def __mod__(self, g):
        return self.divrem(g)[1]

    def exact_div(self, g) -> "Poly":
        return self._w(p_exact_div(self.ctx, list(self.c), self._other(g)))

    def monic(self) -> "Poly":
        return self._w(p_monic(self.ctx, list(self.c)))

    def gcd(self, g) -> "Poly":
        return self._w(p_gcd(self.ctx, list(self.c), self._other(g)))

    def derivative(self) -> "Poly":
        return self._w(p_deriv(self.ctx, list(self.c)))

    def compose(self, g) -> "Poly":
        return self._w(p_compose(self.ctx, list(self.c), self._other(g)))

    def inflate(self, n: int) -> "Poly":
        """f(x^n)."""
        return self._w(p_inflate(list(self.c), n))

    def powmod(self, e: int, m) -> "Poly":
        return self._w(p_powmod(self.ctx, list(self.c), e, self._other(m)))

    def shift(self, n: int) -> "Poly":
        return self._w(p_shift(list(self.c), n))

    def valuation(self) -> int:
        return p_valuation(list(self.c))

    def eval_raw(self, x: int) -> int:
        return p_eval(self.ctx, list(self.c), x)

    def __call__(self, x):
        if isinstance(x, FqElem):
            if x.ctx == self.ctx:
                return FqElem(self.ctx, p_eval(self.ctx, list(self.c), x.v))
            if self.ctx.k == 1 and x.ctx.p == self.ctx.p:
                # prime-field coefficients embed verbatim in any extension
                return FqElem(x.ctx, p_eval(x.ctx, list(self.c), x.v))
            raise CtxMismatch("evaluation point in an incompatible field")
        if isinstance(x, Poly):
            return self.compose(x)
        return FqElem(self.ctx, p_eval(self.ctx, list(self.c), self.ctx.scalar(int(x))))

    def in_prime_field(self) -> bool:
        return all(v < self.ctx.p for v in self.c)

    def change_ring(self, ctx: FieldCtx, embed: Optional[Callable[[int], int]] = None) -> "Poly":
        """Move coefficients to ``ctx`` (verbatim for prime-field data, else via embed)."""
        if embed is None:
            if not self.in_prime_field() or ctx.p != self.ctx.p:
                raise CtxMismatch("need an embedding for non prime-field coefficients")
            return Poly.raw(ctx, list(self.c))
        return Poly.raw(ctx, [embed(v) for v in self.c])

    def __eq__(self, g) -> bool:
        if isinstance(g, Poly):
            return self.ctx == g.ctx and self.c == g.c
        if isinstance(g, (int, FqElem)):
            return list(self.c) == self._other(g)
        return NotImplemented

    def __hash__(self) -> int:
        return hash((self.ctx.p, self.ctx.k, self.c))

    def to_str(self, var: str = "x") -> str:
        if not self.c:
            return "0"
        terms = []
        for i, v in enumerate(self.c):
            if not v:
                continue
            cs = repr(FqElem(self.ctx, v))
            if self.ctx.k > 1 and "+" in cs:
                cs = f"({cs})"
            if i == 0:
                terms.append(cs)
                continue
            mono = var if i == 1 else f"{var}^{i}"
            terms.append(mono if cs == "1" else f"{cs}*{mono}")
        return " + ".join(terms)

    def __repr__(self) -> str:
        return f"Poly({self.to_str()})"


def poly_ops(f: Poly, g: Poly) -> dict:
    """Bundle of the ring operations on a pair (divrem/gcd only when g != 0)."""
    out = {"add": f + g, "sub": f - g, "mul": f * g,
           "derivative": f.derivative()}
    if g:
        out["divrem"] = f.divrem(g)
        out["gcd"] = f.gcd(g)
    return out


# =============================================================================
# root finding and factorisation
# =============================================================================

def _xpow_mod(ctx: FieldCtx, e_base: int, k: int, f: RawPoly) -> RawPoly:
    """x^(e_base^k) mod f via k successive e_base-th powerings."""
    h = p_mod(ctx, [0, 1], f)
    for _ in range(k):
        h = p_powmod(ctx, h, e_base, f)
    return h


def _split_linear(ctx: FieldCtx, g: RawPoly) -> list[int]:
    """Roots of a monic squarefree product of distinct linear factors."""
    if len(g) == 1:
        return []
    if len(g) == 2:
        return [ctx.neg(g[0])]
    half = (ctx.q - 1) // 2
    for delta in range(ctx.q):
        # peel off a root that sits exactly at -delta
        at = p_eval(ctx, g, ctx.neg(delta))
        if at == 0:
            lin = [delta, 1]
            rest = p_exact_div(ctx, g, lin)
            return [ctx.neg(delta)] + _split_linear(ctx, rest)
        h = p_powmod(ctx, [delta, 1], half, g)
        h = p_sub(ctx, h, [1])
        d = p_gcd(ctx, g, h)
        if 1 < len(d) < len(g):
            return _split_linear(ctx, d) + _split_linear(ctx, p_exact_div(ctx, g, d))
    raise AssertionError("splitting failed")  # pragma: no cover


def squarefree_decomposition(ctx: FieldCtx, f: RawPoly) -> list[tuple[RawPoly, int]]:
    """[(g_i, e_i)] with f = lead * prod g_i^e_i, g_i monic squarefree, coprime."""
    f = p_monic(ctx, f)
    if len(f) <= 1:
        return []
    out: list[tuple[RawPoly, int]] = []
    df = p_deriv(ctx, f)
    if not df:
        g = deflate_p(ctx, f)
        return [(h, e * ctx.p) for h, e in squarefree_decomposition(ctx, g)]
    c = p_gcd(ctx, f, df)
    w = p_exact_div(ctx, f, c)
    i = 1
    while len(w) > 1:
        y = p_gcd(ctx, w, c)
        z = p_exact_div(ctx, w, y)
        if len(z) > 1:
            out.append((z, i))
        i += 1
        w = y
        c = p_exact_div(ctx, c, y)
    if len(c) > 1:
        g = deflate_p(ctx, c)
        out.extend((h, e * ctx.p) for h, e in squarefree_decomposition(ctx, g))
    out.sort(key=lambda t: (t[1], t[0]))
    return out


def deflate_p(ctx: FieldCtx, f: RawPoly) -> RawPoly:
    """The g with g^p = f, for f whose exponents are all divisible by p."""
    p = ctx.p
    if any(f[i] for i in range(len(f)) if i % p):
        raise ValueError("polynomial is not a p-th power")
    e = ctx.q // p  # c -> c^(q/p) inverts Frobenius
    return trim([ctx.pow(f[i], e) if ctx.k > 1 else f[i] for i in range(0, len(f), p)])


def distinct_degree_factorization(ctx: FieldCtx, f: RawPoly) -> list[tuple[int, RawPoly]]:
    """For monic squarefree f: [(d, product of all irreducible factors of degree d)]."""
    f = p_monic(ctx, f)
    out = []
    h = [0, 1]
    d = 0
    while len(f) > 1:
        d += 1
        if 2 * d > len(f) - 1:
            out.append((len(f) - 1, f))
            break
        h = p_powmod(ctx, h, ctx.q, f)
        g = p_gcd(ctx, f, p_sub(ctx, h, [0, 1]))
        if len(g) > 1:
            out.append((d, g))
            f = p_exact_div(ctx, f, g)
            h = p_mod(ctx, h, f)
    return out


def _edf(ctx: FieldCtx, g: RawPoly, d: int) -> list[RawPoly]:
    """Split a product of distinct irreducibles of degree d (deterministic trials)."""
    n = len(g) - 1
    if n == d:
        return [g]
    e = (ctx.q**d - 1) // 2
    for code in itertools.count(1):
        # trial polynomials enumerated by their base-q encoding
        t, c = [], code
        while c:
            c, r = divmod(c, ctx.q)
            t.append(r)
        t = trim(t)
        if len(t) < 2:
            continue
        if len(t) > 2 * d:
            raise AssertionError("EDF exhausted trials")  # pragma: no cover
        h = p_powmod(ctx, t, e, g)
        u = p_gcd(ctx, g, p_sub(ctx, h, [1]))
        if 1 < len(u) < len(g):
            return _edf(ctx, u, d) + _edf(ctx, p_exact_div(ctx, g, u), d)
    raise AssertionError  # pragma: no cover


def factor_irreducible(ctx: FieldCtx, f: RawPoly) -> list[tuple[RawPoly, int]]:
    """Complete factorisation of f into monic irreducibles with multiplicities."""
    out = []
    for g, e in squarefree_decomposition(ctx, f):
        for d, part in distinct_degree_factorization(ctx, g):
            for h in _edf(ctx, part, d):
                out.append((h, e))
    out.sort(key=lambda t: (len(t[0]), t[0], t[1]))
    return out


def roots_raw(ctx: FieldCtx, f: RawPoly) -> list[int]:
    """Roots of f in ``ctx`` with multiplicity, sorted by raw encoding."""
    if not f:
        raise ZeroPolynomial("roots of the zero polynomial")
    f = p_monic(ctx, f)
    if len(f) == 1:
        return []
    prime = ctx.k > 1 and all(c < ctx.p for c in f)
    if prime:
        # x^q - x factor computed over F_p; then split irreducible pieces
        Fp = build_extension(ctx.p, 1)
        xq = _xpow_mod(Fp, ctx.p, ctx.k, f)
        g = p_gcd(Fp, f, p_sub(Fp, xq, [0, 1]))
        distinct: list[int] = []
        for d, part in distinct_degree_factorization(Fp, g):
            for h in _edf(Fp, part, d):
                r = _split_linear_first(ctx, h)
                conj = [r]
                for _ in range(d - 1):
                    conj.append(ctx.frobenius(conj[-1]))
                distinct.extend(conj)
    else:
        xq = _xpow_mod(ctx, ctx.q, 1, f) if ctx.k == 1 else _xpow_mod(ctx, ctx.p, ctx.k, f)
        g = p_gcd(ctx, f, p_sub(ctx, xq, [0, 1]))
        distinct = _split_linear(ctx, g)
    out = []
    for r in distinct:
        lin = [ctx.neg(r), 1]
        h = f
        while True:
            q, rem = p_divrem(ctx, h, lin)
            if rem:
                break
            out.append(r)
            h = q
    out.sort()
    return out


def _split_linear_first(ctx: FieldCtx, h: RawPoly) -> int:
    """Some root in ctx of an F_p-irreducible h whose degree divides ctx.k."""
    if len(h) == 2:
        return ctx.neg(h[0])
    half = (ctx.q - 1) // 2
    g = list(h)
    for delta in range(ctx.q):
        if len(g) == 2:
            return ctx.neg(g[0])
        if p_eval(ctx, g, ctx.neg(delta)) == 0:
            return ctx.neg(delta)
        u = p_gcd(ctx, g, p_sub(ctx, p_powmod(ctx, [delta, 1], half, g), [1]))
        if 1 < len(u) < len(g):
            g = u if len(u) <= len(g) - len(u) + 1 else p_exact_div(ctx, g, u)
    raise AssertionError("no root found")  # pragma: no cover


def roots_in_field(f: Poly, ctx: Optional[FieldCtx] = None) -> list[FqElem]:
    """Roots with multiplicity of f in its field (or in a larger ``ctx`` for prime-field f)."""
    if f.is_zero():
        raise ZeroPolynomial("roots of the zero polynomial")
    target = f.ctx if ctx is None else ctx
    if target != f.ctx:
        f = f.change_ring(target)
    return [FqElem(target, r) for r in roots_raw(target, list(f.c))]


# =============================================================================
# field embeddings
# =============================================================================

class FieldEmbedding:
    """The F_p-algebra map F_{p^k} -> F_{p^K} (k | K) sending t to the least root
    of the small field's modulus."""

    def __init__(self, small: FieldCtx, big: FieldCtx):
        if small.p != big.p or big.k % small.k:
            raise CtxMismatch("no embedding between these fields")
        self.small, self.big = small, big
        if small.k == 1:
            self.theta = None
            self._pows = [1]
        else:
            roots = roots_raw(big, list(small.modulus))
            self.theta = min(roots)
            pw = [1]
            for _ in range(small.k - 1):
                pw.append(big.mul(pw[-1], self.theta))
            self._pows = pw
        self._inverse_cache: dict[int, int] = {}
        self._basis = None

    def __call__(self, a: int) -> int:
        if a < self.small.p:
            return a
        big = self.big
        out = 0
        for c, w in zip(self.small.coords(a), self._pows):
            if c:
                out = big.add(out, big.smul(c, w))
        return out

    def elem(self, a: FqElem) -> FqElem:
        return FqElem(self.big, self(a.v))

    def preimage(self, b: int) -> Optional[int]:
        """Inverse on the image; None when b lies outside the subfield."""
        if b < self.big.p:
            return b
        if self.small.k == 1:
            return None
        if self._basis is None:
            cols = [self.big.coords(w) for w in self._pows]
            self._basis = cols
        k, K, p = self.small.k, self.big.k, self.big.p
        # solve sum_i c_i * coords(theta^i) = coords(b) over F_p
        rows = [[self._basis[i][r] for i in range(k)] + [self.big.coords(b)[r]] for r in range(K)]
        sol = solve_affine_mod_p(rows, k, p)
        if sol is None:
            return None
        return self.small.from_coords(sol)


def solve_affine_mod_p(rows: list[list[int]], n: int, p: int) -> Optional[list[int]]:
    """Solve an augmented system [A | b] (n unknowns) mod p; None if inconsistent."""
    m = [list(r) for r in rows]
    piv_cols = []
    r = 0
    for c in range(n):
        pr = next((i for i in range(r, len(m)) if m[i][c] % p), None)
        if pr is None:
            continue
        m[r], m[pr] = m[pr], m[r]
        inv = pow(m[r][c], -1, p)
        m[r] = [x * inv % p for x in m[r]]
        for i in range(len(m)):
            if i != r and m[i][c] % p:
                f = m[i][c]
                m[i] = [(x - f * y) % p for x, y in zip(m[i], m[r])]
        piv_cols.append(c)
        r += 1
    for i in range(r, len(m)):
        if m[i][n] % p:
            return None
    sol = [0] * n
    for i, c in enumerate(piv_cols):
        sol[c] = m[i][n]
    return sol


def nullspace(ctx: FieldCtx, rows: list[list[int]], ncols: int) -> list[list[int]]:
    """Basis of the right kernel of a matrix over ``ctx`` (raw entries)."""
    m = [list(r) for r in rows]
    piv_cols: list[int] = []
    r = 0
    for c in range(ncols):
        pr = next((i for i in range(r, len(m)) if m[i][c]), None)
        if pr is None:
            continue
        m[r], m[pr] = m[pr], m[r]
        inv = ctx.inv(m[r][c])
        m[r] = [ctx.mul(x, inv) for x in m[r]]
        for i in range(len(m)):
            if i != r and m[i][c]:
                f = m[i][c]
                m[i] = [ctx.sub(x, ctx.mul(f, y)) for x, y in zip(m[i], m[r])]
        piv_cols.append(c)
        r += 1
    free = [c for c in range(ncols) if c not in piv_cols]
    basis = []
    for fc in free:
        v = [0] * ncols
        v[fc] = 1
        for i, pc in enumerate(piv_cols):
            v[pc] = ctx.neg(m[i][fc])
        basis.append(v)
    return basis


# =============================================================================
# rational maps
# =============================================================================

class RatMap:
    """A reduced rational function num/den with den monic."""

    __slots__ = ("num", "den")

    def __init__(self, num: Poly, den: Optional[Poly] = None, reduce: bool = True):
        if den is None:
            den = Poly.const(num.ctx, 1)
        if den.is_zero():
            raise DivisionByZero("zero denominator")
        if num.ctx != den.ctx:
            raise CtxMismatch("numerator and denominator over different fields")
        if reduce:
            g = num.gcd(den) if num else den.monic()
            if g.deg > 0:
                num, den = num.exact_div(g), den.exact_div(g)
            lc = den.lead
            if lc != 1:
                inv = lc.inv()
                num, den = num * inv, den * inv
        self.num, self.den = num, den

    @property
    def ctx(self) -> FieldCtx:
        return self.num.ctx

    @property
    def degree(self) -> int:
        return max(self.num.deg, self.den.deg)

    @classmethod
    def identity(cls, ctx: FieldCtx) -> "RatMap":
        return cls(Poly.x(ctx))

    def eval_raw(self, x) -> object:
        """Evaluate at a raw element (or INF) of ctx; returns raw int or INF."""
        ctx = self.ctx
        if x is INF:
            dn, dd = self.num.deg, self.den.deg
            if dn > dd:
                return INF
            if dn < dd:
                return 0
            return ctx.div(self.num.c[-1], self.den.c[-1])
        d = p_eval(ctx, list(self.den.c), x)
        if d == 0:
            return INF
        return ctx.div(p_eval(ctx, list(self.num.c), x), d)

    def __call__(self, x):
        if x is INF:
            r = self.eval_raw(INF)
            return r if r is INF else FqElem(self.ctx, r)
        if isinstance(x, FqElem) and x.ctx != self.ctx:
            if not (self.num.in_prime_field() and self.den.in_prime_field()):
                raise CtxMismatch("map and point over incompatible fields")
            m = RatMap(self.num.change_ring(x.ctx), self.den.change_ring(x.ctx), reduce=False)
            return m(x)
        if not isinstance(x, FqElem):
            x = self.ctx.elem(x)
        r = self.eval_raw(x.v)
        return r if r is INF else FqElem(self.ctx, r)

    def compose(self, other: "RatMap") -> "RatMap":
        """self o other, via homogenisation."""
        n, d = max(self.num.deg, self.den.deg), None
        a, b = other.num, other.den
        ctx = self.ctx
        bp = [Poly.const(ctx, 1)]
        for _ in range(n):
            bp.append(bp[-1] * b)

        def hom(f: Poly) -> Poly:
            out = Poly.raw(ctx, [])
            apow = Poly.const(ctx, 1)
            for i, c in enumerate(f.c):
                if c:
                    out = out + apow * bp[n - i] * FqElem(ctx, c)
                apow = apow * a
            return out

        return RatMap(hom(self.num), hom(self.den))

    def change_ring(self, ctx: FieldCtx) -> "RatMap":
        return RatMap(self.num.change_ring(ctx), self.den.change_ring(ctx), reduce=False)

    def __eq__(self, other) -> bool:
        return isinstance(other, RatMap) and self.num == other.num and self.den == other.den

    def __hash__(self) -> int:
        return hash((self.num, self.den))

    def __repr__(self) -> str:
        if self.den.deg == 0:
            return f"RatMap({self.num.to_str()})"
        return f"RatMap(({self.num.to_str()}) / ({self.den.to_str()}))"


def descend_to_prime_field(f: Poly) -> Poly:
    """View a polynomial with prime-field coefficients over F_p itself."""
    if not f.in_prime_field():
        raise CtxMismatch("coefficients do not lie in the prime field")
    return Poly.raw(build_extension(f.ctx.p, 1), list(f.c))


# =============================================================================
# matrices and determinants
# =============================================================================

class PolyMatrix:
    """A rectangular array of Poly over one field."""

    __slots__ = ("ctx", "rows")

    def __init__(self, rows: Sequence[Sequence[Poly]], ctx: Optional[FieldCtx] = None):
        rows = [list(r) for r in rows]
        if rows and any(len(r) != len(rows[0]) for r in rows):
            raise ShapeError("ragged matrix")
        if ctx is None:
            if not rows or not rows[0]:
                raise ShapeError("empty matrix needs an explicit ctx")
            ctx = rows[0][0].ctx
        for r in rows:
            for e in r:
                if e.ctx != ctx:
                    raise CtxMismatch("matrix entries over different fields")
        self.ctx = ctx
        self.rows = rows

    @property
    def shape(self) -> tuple[int, int]:
        return (len(self.rows), len(self.rows[0]) if self.rows else 0)

    def __getitem__(self, ij):
        i, j = ij
        return self.rows[i][j]


def bareiss_det(M: PolyMatrix) -> Poly:
    """Fraction-free (Bareiss) determinant with row pivoting."""
    n, m = M.shape
    if n != m:
        raise ShapeError(f"determinant of a {n}x{m} matrix")
    ctx = M.ctx
    if n == 0:
        return Poly.const(ctx, 1)
    a = [[list(e.c) for e in row] for row in M.rows]
    sign = 1
    prev: RawPoly = [1]
    for k in range(n - 1):
        if not a[k][k]:
            swap = next((i for i in range(k + 1, n) if a[i][k]), None)
            if swap is None:
                return Poly.raw(ctx, [])
            a[k], a[swap] = a[swap], a[k]
            sign = -sign
        akk = a[k][k]
        for i in range(k + 1, n):
            aik = a[i][k]
            row_i, row_k = a[i], a[k]
            for j in range(k + 1, n):
                t = p_sub(ctx, p_mul(ctx, akk, row_i[j]), p_mul(ctx, aik, row_k[j]))
                row_i[j] = t if prev == [1] else p_exact_div(ctx, t, prev)
            row_i[k] = []
        prev = akk
    det = a[n - 1][n - 1]
    if sign < 0:
        det = p_neg(ctx, det)
    return Poly.raw(ctx, det)


def cofactor_det(M: PolyMatrix) -> Poly:
    """Laplace expansion along the first row; reference oracle for small n."""
    n, m = M.shape
    if n != m:
        raise ShapeError("non-square")
    ctx = M.ctx
    if n == 0:
        return Poly.const(ctx, 1)
    if n == 1:
        return M.rows[0][0]
    total = Poly.raw(ctx, [])
    for j in range(n):
        minor = PolyMatrix([r[:j] + r[j + 1:] for r in M.rows[1:]], ctx)
        term = M.rows[0][j] * cofactor_det(minor)
        total = total + term if j % 2 == 0 else total - term
    return total


# =============================================================================
# evaluation / interpolation determinant engine over F_{p^2}
# =============================================================================

class _QuadArrays:
    """Vectorised arithmetic in F_{p^2} = F_p[t]/(t^2 + c1 t + c0) on pairs of int64 arrays."""

    def __init__(self, ctx: FieldCtx):
        if ctx.k != 2:
            raise ValueError("quadratic field expected")
        self.p = ctx.p
        self.c0, self.c1 = ctx.modulus[0], ctx.modulus[1]
        self.inv_table = np.array([0] + [pow(i, -1, ctx.p) for i in range(1, ctx.p)], dtype=np.int64)

    def mul_lazy(self, a0, a1, b0, b1):
        """Product of reduced operands, left unreduced (entries below 2p^3, no int64 overflow)."""
        x2 = a1 * b1
        # t^2 = -c0 - c1 t
        return a0 * b0 - self.c0 * x2, a0 * b1 + a1 * b0 - self.c1 * x2

    def mul(self, a0, a1, b0, b1):
        x0, x1 = self.mul_lazy(a0, a1, b0, b1)
        return x0 % self.p, x1 % self.p

    def inv(self, a0, a1):
        p = self.p
        norm = (a0 * a0 - self.c1 * a0 % p * a1 + self.c0 * a1 % p * a1) % p
        ninv = self.inv_table[norm]
        return (a0 - self.c1 * a1) % p * ninv % p, (-a1) % p * ninv % p


def batched_det_quadratic(ctx: FieldCtx, A0: np.ndarray, A1: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Determinants of a batch (B, n, n) of matrices over F_{p^2} given as coordinate arrays."""
    Q = _QuadArrays(ctx)
    p = ctx.p
    A0 = A0.astype(np.int64).copy()
    A1 = A1.astype(np.int64).copy()
    B, n, _ = A0.shape
    d0 = np.ones(B, dtype=np.int64)
    d1 = np.zeros(B, dtype=np.int64)
    alive = np.ones(B, dtype=bool)
    idx = np.arange(B)
    for k in range(n):
        nz = (A0[:, k:, k] != 0) | (A1[:, k:, k] != 0)
        has = nz.any(axis=1)
        alive &= has
        piv = k + np.argmax(nz, axis=1)
        swap = piv != k
        if swap.any():
            rows_k0 = A0[idx, k].copy()
            rows_k1 = A1[idx, k].copy()
            A0[idx, k] = A0[idx, piv]
            A1[idx, k] = A1[idx, piv]
            A0[idx, piv] = rows_k0
            A1[idx, piv] = rows_k1
            d0 = np.where(swap, (-d0) % p, d0)
            d1 = np.where(swap, (-d1) % p, d1)
        p0, p1 = A0[:, k, k], A1[:, k, k]
        d0, d1 = Q.mul(d0, d1, p0, p1)
        if k == n - 1:
            break
        i0, i1 = Q.inv(p0, p1)
        # factors f_i = A[i,k] / pivot for rows below
        f0, f1 = Q.mul(A0[:, k + 1:, k], A1[:, k + 1:, k], i0[:, None], i1[:, None])
        r0 = A0[:, k, k + 1:][:, None, :]
        r1 = A1[:, k, k + 1:][:, None, :]
        m0, m1 = Q.mul_lazy(f0[:, :, None], f1[:, :, None], r0, r1)
        A0[:, k + 1:, k + 1:] = (A0[:, k + 1:, k + 1:] - m0) % p
        A1[:, k + 1:, k + 1:] = (A1[:, k + 1:, k + 1:] - m1) % p
    d0 = np.where(alive, d0, 0)
    d1 = np.where(alive, d1, 0)
    return d0, d1


def interpolate_raw(ctx: FieldCtx, xs: Sequence[int], ys: Sequence[int]) -> RawPoly:
    """Lagrange interpolation (Newton divided differences) on raw elements."""
    n = len(xs)
    if len(set(xs)) != n:
        raise BadSamples("duplicate abscissae")
    coef = list(ys)
    for j in range(1, n):
        for i in range(n - 1, j - 1, -1):
            num = ctx.sub(coef[i], coef[i - 1])
            den = ctx.sub(xs[i], xs[i - j])
            coef[i] = ctx.div(num, den)
    out: RawPoly = []
    for i in range(n - 1, -1, -1):
        out = p_mul(ctx, out, [ctx.neg(xs[i]), 1])
        out = p_add(ctx, out, [coef[i]] if coef[i] else [])
    return out


def interpolate_quadratic(ctx: FieldCtx, xs0, xs1, ys0, ys1) -> tuple[np.ndarray, np.ndarray]:
    """Newton interpolation over F_{p^2} vectorised with numpy; returns monomial coordinates."""
    Q = _QuadArrays(ctx)
    p = ctx.p
    x0 = np.asarray(xs0, dtype=np.int64)
    x1 = np.asarray(xs1, dtype=np.int64)
    c0 = np.asarray(ys0, dtype=np.int64).copy()
    c1 = np.asarray(ys1, dtype=np.int64).copy()
    n = len(x0)
    for j in range(1, n):
        n0 = (c0[j:] - c0[j - 1:-1]) % p
        n1 = (c1[j:] - c1[j - 1:-1]) % p
        dx0 = (x0[j:] - x0[:n - j]) % p
        dx1 = (x1[j:] - x1[:n - j]) % p
        i0, i1 = Q.inv(dx0, dx1)
        c0[j:], c1[j:] = Q.mul(n0, n1, i0, i1)
    # Horner back to monomial basis
    r0 = np.zeros(n, dtype=np.int64)
    r1 = np.zeros(n, dtype=np.int64)
    for i in range(n - 1, -1, -1):
        # r <- r * (x - x_i) + c_i
        s0 = np.zeros(n, dtype=np.int64)
        s1 = np.zeros(n, dtype=np.int64)
        s0[1:] = r0[:-1]
        s1[1:] = r1[:-1]
        t0, t1 = Q.mul(r0, r1, np.full(n, x0[i]), np.full(n, x1[i]))
        s0 = (s0 - t0) % p
        s1 = (s1 - t1) % p
        s0[0] = (s0[0] + c0[i]) % p
        s1[0] = (s1[0] + c1[i]) % p
        r0, r1 = s0, s1
    return r0, r1


def det_by_evaluation(p: int, entry_values: Callable[[np.ndarray, np.ndarray], tuple[np.ndarray, np.ndarray]],
                      n: int, degree_bound: int, batch: int = 1024) -> Poly:
    """Determinant of an n x n matrix over F_p[l] of degree <= degree_bound.

    ``entry_values(l0, l1)`` returns the (B, n, n) coordinate arrays of the
    matrix at the F_{p^2} points (l0 + l1 t).  Requires degree_bound < p^2.
    """
    ctx = build_extension(p, 2)
    npts = degree_bound + 1
    if npts > ctx.q:
        raise ValueError("not enough evaluation points in F_{p^2}")
    pts = np.arange(npts, dtype=np.int64)
    l0, l1 = pts % p, pts // p
    d0 = np.zeros(npts, dtype=np.int64)
    d1 = np.zeros(npts, dtype=np.int64)
    for s in range(0, npts, batch):
        e = min(npts, s + batch)
        A0, A1 = entry_values(l0[s:e], l1[s:e])
        d0[s:e], d1[s:e] = batched_det_quadratic(ctx, A0, A1)
    c0, c1 = interpolate_quadratic(ctx, l0, l1, d0, d1)
    if np.any(c1):
        raise ArithmeticError("interpolated determinant left the prime field")
    return Poly.raw(build_extension(p, 1), trim(c0.tolist()))


# =============================================================================
# rational reconstruction
# =============================================================================

Sample = tuple  # (x, y) with x an FqElem/raw int and y an FqElem/raw int or INF


def rational_reconstruct_raw(ctx: FieldCtx, samples: Sequence[tuple], degN: int, degD: int) -> tuple[RawPoly, RawPoly]:
    """Raw-level Cauchy interpolation.  Returns (num, den) reduced, den monic."""
    xs = [x for x, _ in samples]
    if len(set(xs)) != len(xs):
        raise BadSamples("duplicate abscissae")
    if len(samples) < degN + degD + 2:
        raise BadSamples("too few samples for the degree bounds")
    poles = [x for x, y in samples if y is INF]
    finite = [(x, y) for x, y in samples if y is not INF]
    dD = degD - len(poles)
    if dD < 0:
        raise NoInterpolant("more poles than the denominator bound allows")
    P = p_from_roots(ctx, poles)
    fx = [x for x, _ in finite]
    fy = [ctx.mul(y, p_eval(ctx, P, x)) for x, y in finite]
    if len(finite) < degN + dD + 1:
        raise NoInterpolant("not enough finite samples")
    M = p_from_roots(ctx, fx)
    L = interpolate_raw(ctx, fx, fy)
    r0, r1 = M, L
    t0, t1 = [], [1]
    while len(r1) - 1 > degN:
        q, r = p_divrem(ctx, r0, r1)
        r0, r1 = r1, r
        t0, t1 = t1, p_sub(ctx, t0, p_mul(ctx, q, t1))
    num, den = r1, t1
    if not den or len(den) - 1 > dD:
        raise NoInterpolant("no fit within the degree bounds")
    den = p_mul(ctx, den, P)
    if num:
        g = p_gcd(ctx, num, den)
        if len(g) > 1:
            num, den = p_exact_div(ctx, num, g), p_exact_div(ctx, den, g)
    else:
        den = [1]
    c = ctx.inv(den[-1])
    num, den = p_scale(ctx, c, num), p_scale(ctx, c, den)
    for x, y in samples:
        dv = p_eval(ctx, den, x)
        if y is INF:
            if dv != 0:
                raise NoInterpolant("pole sample not matched")
        elif dv == 0 or ctx.mul(y, dv) != p_eval(ctx, num, x):
            raise NoInterpolant("reconstructed map disagrees with a sample")
    return num, den


def rational_reconstruct(samples: Sequence[tuple], degN: int, degD: int,
                         ctx: Optional[FieldCtx] = None) -> RatMap:
    """Reconstruct the unique reduced num/den (deg num <= degN, deg den <= degD)
    matching every (x, y) sample; y may be ``INF`` (x is then a pole)."""
    if ctx is None:
        for x, y in samples:
            if isinstance(x, FqElem):
                ctx = x.ctx
                break
        if ctx is None:
            raise BadSamples("cannot infer the field from raw samples")
    raw = []
    for x, y in samples:
        xv = x.v if isinstance(x, FqElem) else int(x)
        yv = y if y is INF else (y.v if isinstance(y, FqElem) else int(y))
        raw.append((xv, yv))
    num, den = rational_reconstruct_raw(ctx, raw, degN, degD)
    return RatMap(Poly.raw(ctx, num), Poly.raw(ctx, den), reduce=False)
