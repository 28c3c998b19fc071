"""Finite fields F_p and F_{p^k}, plus a tiny mod-p^2 integer type.

Elements are handled in two layers:

* ``FieldCtx`` works on *raw* Python ints.  An element with coordinates
  (c_0, ..., c_{k-1}) in the power basis 1, t, ..., t^{k-1} is encoded as
  ``c_0 + c_1 p + ... + c_{k-1} p^{k-1}``.  Prime-field constants therefore
  have the same encoding in every extension, which keeps polynomial code
  (``poly_lab``) simple and fast.
* ``FqElem`` is a small immutable wrapper with operator overloading for
  user-facing code and tests.

For extensions of moderate size (q <= 2**17) multiplication goes through
discrete log / exp tables built lazily on first use; larger fields fall
back to schoolbook coordinate arithmetic.
"""

from __future__ import annotations

import functools
from array import array
from typing import Iterable, Iterator, Optional, Sequence

from .errors import CtxMismatch, DivisionByZero, NotPrime

TABLE_LIMIT = 1 << 17
SCAN_SQRT_LIMIT = 10_000


def is_prime(n: int) -> bool:
    """Deterministic Miller-Rabin, exact for n < 3.3e24."""
    if n < 2:
        return False
    small = (2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41)
    for q in small:
        if n % q == 0:
            return n == q
    d, s = n - 1, 0
    while d % 2 == 0:
        d //= 2
        s += 1
    for a in small:
        x = pow(a, d, n)
        if x in (1, n - 1):
            continue
        for _ in range(s - 1):
            x = x * x % n
            if x == n - 1:
                break
        else:
            return False
    return True


def factor_int(n: int) -> dict[int, int]:
    """Trial-division factorisation (inputs here are group orders of desk size)."""
    out: dict[int, int] = {}
    d = 2
    while d * d <= n:
        while n % d == 0:
            out[d] = out.get(d, 0) + 1
            n //= d
        d += 1 if d == 2 else 2
    if n > 1:
        out[n] = out.get(n, 0) + 1
    return out


# ---------------------------------------------------------------------------
# minimal dense polynomial helpers over F_p (lists, low -> high); used only to
# pick and validate the defining modulus.  The real polynomial library lives
# in poly_lab and sits on top of this module.
# ---------------------------------------------------------------------------

def _trim(a: list[int]) -> list[int]:
    while a and a[-1] == 0:
        a.pop()
    return a


def _pmod(a: Sequence[int], m: Sequence[int], p: int) -> list[int]:
    a = list(a)
    dm = len(m) - 1
    inv = pow(m[-1], -1, p)
    for i in range(len(a) - 1, dm - 1, -1):
        c = a[i] * inv % p
        if c:
            for j in range(dm + 1):
                a[i - dm + j] = (a[i - dm + j] - c * m[j]) % p
    return _trim(a[:dm])


def _pmul(a: Sequence[int], b: Sequence[int], p: int) -> list[int]:
    if not a or not b:
        return []
    out = [0] * (len(a) + len(b) - 1)
    for i, x in enumerate(a):
        if x:
            for j, y in enumerate(b):
                out[i + j] += x * y
    return _trim([c % p for c in out])


def _ppowmod(base: list[int], e: int, m: Sequence[int], p: int) -> list[int]:
    result = [1]
    base = _pmod(base, m, p)
    while e:
        if e & 1:
            result = _pmod(_pmul(result, base, p), m, p)
        base = _pmod(_pmul(base, base, p), m, p)
        e >>= 1
    return result


def _pgcd(a: list[int], b: list[int], p: int) -> list[int]:
    a, b = _trim(list(a)), _trim(list(b))
    while b:
        a, b = b, _pmod(a, b, p)
    return a


def is_irreducible_mod_p(f: Sequence[int], p: int) -> bool:
    """Rabin's irreducibility test for a monic polynomial over F_p."""
    k = len(f) - 1
    if k <= 0:
        return False
    if k == 1:
        return True
    x = [0, 1]
    if _ppowmod(x, p**k, f, p) != _pmod(x, f, p):
        return False
    for r in factor_int(k):
        h = _ppowmod(x, p ** (k // r), f, p)
        diff = list(h) + [0] * max(0, 2 - len(h))
        diff[1] = (diff[1] - 1) % p
        g = _pgcd(list(f), _trim(diff), p)
        if len(g) > 1:
            return False
    return True


def _least_irreducible(p: int, k: int) -> tuple[int, ...]:
    """Monic irreducible of degree k whose lower coefficients, read as a base-p
    number (c_0 least significant), are minimal."""
    if k == 1:
        return (0, 1)
    for code in range(p**k):
        coeffs = []
        c = code
        for _ in range(k):
            c, r = divmod(c, p)
            coeffs.append(r)
        f = coeffs + [1]
        if f[0] == 0:
            continue
        if is_irreducible_mod_p(f, p):
            return tuple(f)
    raise AssertionError("no irreducible polynomial found")  # pragma: no cover


class FieldCtx:
    """The field F_{p^k} = F_p[t]/(modulus).  Immutable after construction."""

    __slots__ = ("p", "k", "q", "modulus", "_ppow", "_exp", "_log", "_sq",
                 "_nonres", "__weakref__")

    def __init__(self, p: int, k: int = 1, modulus: Optional[Sequence[int]] = None):
        if p < 3 or not is_prime(p):
            raise NotPrime(f"{p} is not an odd prime")
        if k < 1:
            raise ValueError("extension degree must be >= 1")
        if modulus is None:
            modulus = _least_irreducible(p, k)
        modulus = tuple(int(c) % p for c in modulus)
        if len(modulus) != k + 1 or modulus[-1] != 1:
            raise ValueError("modulus must be monic of degree k")
        if k > 1 and not is_irreducible_mod_p(modulus, p):
            raise ValueError("modulus is reducible")
        self.p = p
        self.k = k
        self.q = p**k
        self.modulus = modulus
        self._ppow = tuple(p**i for i in range(k + 1))
        self._exp = None
        self._log = None
        self._sq = None
        self._nonres = None

    # -- identity -----------------------------------------------------------
    def __repr__(self) -> str:
        return f"FieldCtx(p={self.p}, k={self.k}, modulus={self.modulus})"

    def __eq__(self, other) -> bool:
        return (isinstance(other, FieldCtx) and self.p == other.p
                and self.modulus == other.modulus)

    def __hash__(self) -> int:
        return hash((self.p, self.modulus))

    def __reduce__(self):
        return (FieldCtx, (self.p, self.k, self.modulus))

    # -- encoding -----------------------------------------------------------
    def coords(self, a: int) -> tuple[int, ...]:
        p = self.p
        out = []
        for _ in range(self.k):
            a, r = divmod(a, p)
            out.append(r)
        return tuple(out)

    def from_coords(self, cs: Iterable[int]) -> int:
        p = self.p
        v = 0
        cs = list(cs)
        if len(cs) > self.k:
            raise ValueError("too many coordinates")
        for i in reversed(range(len(cs))):
            v = v * p + cs[i] % p
        return v

    def gen(self) -> int:
        """The class of t (for k = 1 this is just 0, the root of X)."""
        return self.p if self.k > 1 else 0

    def elements(self) -> range:
        return range(self.q)

    def elem(self, v) -> "FqElem":
        if isinstance(v, FqElem):
            if v.ctx != self:
                raise CtxMismatch("element from another field")
            return v
        if isinstance(v, (tuple, list)):
            return FqElem(self, self.from_coords(v))
        return FqElem(self, self.scalar(int(v)))

    def scalar(self, n: int) -> int:
        """Image of the integer n (prime subfield)."""
        return n % self.p

    def in_prime_field(self, a: int) -> bool:
        return a < self.p

    # -- additive group -----------------------------------------------------
    def add(self, a: int, b: int) -> int:
        p = self.p
        if self.k == 1:
            s = a + b
            return s - p if s >= p else s
        if self.k == 2:
            a1, a0 = divmod(a, p)
            b1, b0 = divmod(b, p)
            return (a0 + b0) % p + (a1 + b1) % p * p
        return self.from_coords(x + y for x, y in zip(self.coords(a), self.coords(b)))

    def neg(self, a: int) -> int:
        p = self.p
        if self.k == 1:
            return (p - a) % p
        if self.k == 2:
            a1, a0 = divmod(a, p)
            return (-a0) % p + (-a1) % p * p
        return self.from_coords(-x for x in self.coords(a))

    def sub(self, a: int, b: int) -> int:
        return self.add(a, self.neg(b))

    def smul(self, n: int, a: int) -> int:
        """Multiply by an element of the prime field."""
        n %= self.p
        if self.k == 1:
            return n * a % self.p
        return self.from_coords(n * x for x in self.coords(a))

    # -- multiplicative structure ------------------------------------------
    def _mul_generic(self, a: int, b: int) -> int:
        p, k, m = self.p, self.k, self.modulus
        ca, cb = self.coords(a), self.coords(b)
        prod = [0] * (2 * k - 1)
        for i, x in enumerate(ca):
            if x:
                for j, y in enumerate(cb):
                    prod[i + j] += x * y
        for i in range(2 * k - 2, k - 1, -1):
            c = prod[i] % p
            if c:
                for j in range(k):
                    prod[i - k + j] -= c * m[j]
        return self.from_coords(prod[:k])

    def _tables(self):
        if self._exp is None:
            q = self.q
            g = self.primitive_element()
            exp = array("l", [0]) * (q - 1)
            log = array("l", [-1]) * q
            x = 1
            for i in range(q - 1):
                exp[i] = x
                log[x] = i
                x = self._mul_generic(x, g)
            self._exp, self._log = exp, log
        return self._exp, self._log

    def _has_tables(self) -> bool:
        return self.k > 1 and self.q <= TABLE_LIMIT

    def mul(self, a: int, b: int) -> int:
        if self.k == 1:
            return a * b % self.p
        if not a or not b:
            return 0
        if a < self.p:
            return self.smul(a, b)
        if b < self.p:
            return self.smul(b, a)
        if self._has_tables():
            exp, log = self._tables()
            return exp[(log[a] + log[b]) % (self.q - 1)]
        return self._mul_generic(a, b)

    def sqr(self, a: int) -> int:
        return self.mul(a, a)

    def pow(self, a: int, e: int) -> int:
        if e < 0:
            a = self.inv(a)
            e = -e
        if self.k == 1:
            return pow(a, e, self.p)
        if a == 0:
            return 1 if e == 0 else 0
        if self._has_tables():
            exp, log = self._tables()
            return exp[log[a] * e % (self.q - 1)]
        result, base = 1, a
        while e:
            if e & 1:
                result = self._mul_generic(result, base)
            e >>= 1
            if e:
                base = self._mul_generic(base, base)
        return result

    def inv(self, a: int) -> int:
        if a == 0:
            raise DivisionByZero("inverse of zero")
        if self.k == 1:
            return pow(a, -1, self.p)
        if a < self.p:
            return pow(a, -1, self.p)
        if self._has_tables():
            exp, log = self._tables()
            return exp[(-log[a]) % (self.q - 1)]
        return self.pow(a, self.q - 2)

    def div(self, a: int, b: int) -> int:
        return self.mul(a, self.inv(b))

    def frobenius(self, a: int) -> int:
        return self.pow(a, self.p) if self.k > 1 else a

    def order(self, a: int) -> int:
        """Multiplicative order of a nonzero element."""
        if a == 0:
            raise DivisionByZero("zero has no multiplicative order")
        n = self.q - 1
        for r, e in factor_int(self.q - 1).items():
            for _ in range(e):
                if self.pow(a, n // r) == 1:
                    n //= r
                else:
                    break
        return n

    def primitive_element(self) -> int:
        """Least (by encoding) generator of the multiplicative group."""
        fac = list(factor_int(self.q - 1))
        for g in range(1, self.q):
            if all(self._pow_generic(g, (self.q - 1) // r) != 1 for r in fac):
                return g
        raise AssertionError("no primitive element")  # pragma: no cover

    def _pow_generic(self, a: int, e: int) -> int:
        if self.k == 1:
            return pow(a, e, self.p)
        result, base = 1, a
        while e:
            if e & 1:
                result = self._mul_generic(result, base)
            e >>= 1
            if e:
                base = self._mul_generic(base, base)
        return result

    # -- square roots -------------------------------------------------------
    def is_square(self, a: int) -> bool:
        return a == 0 or self.pow(a, (self.q - 1) // 2) == 1

    def canonical(self, a: int, b: int) -> int:
        """Of two elements, the one with the least coordinate tuple (c_0, c_1, ...)."""
        return a if self.coords(a) <= self.coords(b) else b

    def sqrt(self, a: int) -> Optional[int]:
        """Canonical square root, or None if a is a non-square."""
        if a == 0:
            return 0
        if self.q <= SCAN_SQRT_LIMIT:
            if self._sq is None:
                table: dict[int, int] = {}
                for x in range(self.q):
                    s = self.sqr(x)
                    if s not in table or self.coords(x) < self.coords(table[s]):
                        table[s] = x
                self._sq = table
            return self._sq.get(a)
        r = self._tonelli_shanks(a)
        if r is None:
            return None
        return self.canonical(r, self.neg(r))

    def _tonelli_shanks(self, a: int) -> Optional[int]:
        q = self.q
        if not self.is_square(a):
            return None
        s, t = 0, q - 1
        while t % 2 == 0:
            s += 1
            t //= 2
        if self._nonres is None:
            z = 2
            while self.is_square(z):
                z += 1
            self._nonres = z
        c = self.pow(self._nonres, t)
        x = self.pow(a, (t + 1) // 2)
        b = self.pow(a, t)
        m = s
        while b != 1:
            i, bb = 0, b
            while bb != 1:
                bb = self.sqr(bb)
                i += 1
            w = c
            for _ in range(m - i - 1):
                w = self.sqr(w)
            x = self.mul(x, w)
            c = self.sqr(w)
            b = self.mul(b, c)
            m = i
        return x


@functools.lru_cache(maxsize=None)
def _least_irreducible_cached(p: int, k: int) -> tuple[int, ...]:
    return _least_irreducible(p, k)


@functools.lru_cache(maxsize=None)
def build_extension(p: int, k: int = 1) -> FieldCtx:
    """The field F_{p^k} with the deterministic (least) monic irreducible modulus.

    >>> build_extension(3, 2).modulus
    (1, 0, 1)
    """
    if p < 3 or not is_prime(p):
        raise NotPrime(f"{p} is not an odd prime")
    return FieldCtx(p, k, _least_irreducible_cached(p, k))


def prime_field(p: int) -> FieldCtx:
    return build_extension(p, 1)


class FqElem:
    """An element of a ``FieldCtx``; hashable value type."""

    __slots__ = ("ctx", "v")

    def __init__(self, ctx: FieldCtx, v: int):
        self.ctx = ctx
        self.v = v

    @property
    def coords(self) -> tuple[int, ...]:
        return self.ctx.coords(self.v)

    def _other(self, b) -> int:
        if isinstance(b, FqElem):
            if b.ctx is not self.ctx and b.ctx != self.ctx:
                raise CtxMismatch(f"{b.ctx!r} vs {self.ctx!r}")
            return b.v
        if isinstance(b, int):
            return self.ctx.scalar(b)
        return NotImplemented

    def _wrap(self, v: int) -> "FqElem":
        return FqElem(self.ctx, v)

    def __add__(self, b):
        o = self._other(b)
        return NotImplemented if o is NotImplemented else self._wrap(self.ctx.add(self.v, o))

    __radd__ = __add__

    def __sub__(self, b):
        o = self._other(b)
        return NotImplemented if o is NotImplemented else self._wrap(self.ctx.sub(self.v, o))

    def __rsub__(self, b):
        o = self._other(b)
        return NotImplemented if o is NotImplemented else self._wrap(self.ctx.sub(o, self.v))

    def __mul__(self, b):
        o = self._other(b)
        return NotImplemented if o is NotImplemented else self._wrap(self.ctx.mul(self.v, o))

    __rmul__ = __mul__

    def __truediv__(self, b):
        o = self._other(b)
        return NotImplemented if o is NotImplemented else self._wrap(self.ctx.div(self.v, o))

    def __rtruediv__(self, b):
        o = self._other(b)
        return NotImplemented if o is NotImplemented else self._wrap(self.ctx.div(o, self.v))

    def __neg__(self):
        return self._wrap(self.ctx.neg(self.v))

    def __pow__(self, e: int):
        return self._wrap(self.ctx.pow(self.v, e))

    def inv(self) -> "FqElem":
        return self._wrap(self.ctx.inv(self.v))

    def frobenius(self) -> "FqElem":
        return frobenius(self)

    def sqrt(self) -> Optional["FqElem"]:
        return sqrt_in_field(self)

    def is_zero(self) -> bool:
        return self.v == 0

    def __bool__(self) -> bool:
        return self.v != 0

    def __eq__(self, b) -> bool:
        if isinstance(b, FqElem):
            return self.ctx == b.ctx and self.v == b.v
        if isinstance(b, int):
            return self.v == self.ctx.scalar(b)
        return NotImplemented

    def __hash__(self) -> int:
        return hash((self.ctx.p, self.ctx.k, self.v))

    def __int__(self) -> int:
        if self.v >= self.ctx.p:
            raise ValueError("element is not in the prime field")
        return self.v

    def __repr__(self) -> str:
        if self.ctx.k == 1:
            return f"{self.v}"
        terms = []
        for i, c in enumerate(self.coords):
            if c:
                terms.append(f"{c}" if i == 0 else (f"{c}*t" if i == 1 else f"{c}*t^{i}"))
        return " + ".join(terms) if terms else "0"


# functional API -------------------------------------------------------------

def field_ops(a: FqElem, b: FqElem) -> dict[str, FqElem]:
    """All binary field operations on a pair (division only when b != 0)."""
    out = {"add": a + b, "sub": a - b, "mul": a * b, "neg": -a}
    if b:
        out["div"] = a / b
        out["inv"] = b.inv()
    return out


def frobenius(a: FqElem) -> FqElem:
    """The absolute Frobenius a -> a^p."""
    return FqElem(a.ctx, a.ctx.frobenius(a.v))


def sqrt_in_field(a: FqElem) -> Optional[FqElem]:
    r = a.ctx.sqrt(a.v)
    return None if r is None else FqElem(a.ctx, r)


def iter_field(ctx: FieldCtx) -> Iterator[FqElem]:
    for v in range(ctx.q):
        yield FqElem(ctx, v)


class W2Int:
    """Residues modulo p^2 (Witt vectors of length two over the prime field)."""

    __slots__ = ("p", "v")

    def __init__(self, p: int, v: int):
        self.p = p
        self.v = v % (p * p)

    @property
    def modulus(self) -> int:
        return self.p * self.p

    def _o(self, b) -> int:
        if isinstance(b, W2Int):
            if b.p != self.p:
                raise CtxMismatch("different primes")
            return b.v
        return int(b)

    def __add__(self, b):
        return W2Int(self.p, self.v + self._o(b))

    __radd__ = __add__

    def __sub__(self, b):
        return W2Int(self.p, self.v - self._o(b))

    def __rsub__(self, b):
        return W2Int(self.p, self._o(b) - self.v)

    def __mul__(self, b):
        return W2Int(self.p, self.v * self._o(b))

    __rmul__ = __mul__

    def __neg__(self):
        return W2Int(self.p, -self.v)

    def __pow__(self, e: int):
        return W2Int(self.p, pow(self.v, e, self.p * self.p))

    def inv(self) -> "W2Int":
        if self.v % self.p == 0:
            raise DivisionByZero("not a unit mod p^2")
        return W2Int(self.p, pow(self.v, -1, self.p * self.p))

    def reduce(self) -> int:
        """Image in F_p."""
        return self.v % self.p

    def divide_by_p(self) -> int:
        """For v divisible by p, the residue (v/p) mod p."""
        if self.v % self.p:
            raise ValueError("value is not divisible by p")
        return self.v // self.p

    def __eq__(self, b) -> bool:
        if isinstance(b, W2Int):
            return self.p == b.p and self.v == b.v
        if isinstance(b, int):
            return self.v == b % (self.p * self.p)
        return NotImplemented

    def __hash__(self) -> int:
        return hash((self.p, self.v))

    def __repr__(self) -> str:
        return f"W2Int({self.v} mod {self.p}^2)"
