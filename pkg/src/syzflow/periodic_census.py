"""Counting periodic points: lambda(N), lambda'(N), phi_2(N), Z(f), Lambda_alpha, M_alpha.

Every closed formula here comes with a brute-force counterpart (``brute_*``
and ``*_oracle``) that only uses explicit group enumeration.  The Z(f)
oracle combines brute data of the prime-power unit groups through the CRT,
so it does not depend on the enumeration bound M(f) or on the cyclicity rule.
"""

from __future__ import annotations

import csv
import io
import itertools
import math
from dataclasses import asdict, dataclass
from fractions import Fraction
from functools import lru_cache
from typing import Iterable, Optional, Sequence

import numpy as np

from .errors import BadInput
from .fq_arith import factor_int


def _check_n(N: int, name: str = "N") -> None:
    if not isinstance(N, int) or isinstance(N, bool) or N < 1:
        raise BadInput(f"{name} must be a positive integer, got {N!r}")


def _lcm(values: Iterable[int]) -> int:
    out = 1
    for v in values:
        out = out * v // math.gcd(out, v)
    return out


# =============================================================================
# closed formulas
# =============================================================================

def carmichael(N: int) -> int:
    """Universal exponent of (Z/N)^*."""
    _check_n(N)
    parts = []
    for q, s in factor_int(N).items():
        if q == 2:
            parts.append(2 ** max(0, s - 2) if s != 2 else 2)
        else:
            parts.append((q - 1) * q ** (s - 1))
    return _lcm(parts)


def units_cyclic(N: int) -> bool:
    """(Z/N)^* is cyclic iff N in {1, 2, 4, q^s, 2 q^s} (q odd prime)."""
    _check_n(N)
    if N in (1, 2, 4):
        return True
    f = factor_int(N)
    odd = [q for q in f if q != 2]
    return len(odd) == 1 and f.get(2, 0) <= 1


def lambda_prime(N: int) -> int:
    """Period of the image of a strict N-torsion point."""
    _check_n(N)
    if N <= 2:
        return 1
    lam = carmichael(N)
    return lam // 2 if units_cyclic(N) else lam


def phi2(N: int) -> int:
    """Number of elements of exact order N in (Z/N)^2."""
    _check_n(N)
    out = N * N
    for q in factor_int(N):
        out = out // (q * q) * (q * q - 1)
    return out


def enumeration_bound(f: int) -> int:
    """M(f) = 2^(v2(2f)+2) prod_{odd q, (q-1) | 2f} q^(v_q(2f)+1)."""
    _check_n(f, "f")
    two_f = 2 * f
    fac = factor_int(two_f)
    M = 2 ** (fac.get(2, 0) + 2)
    for d in _divisors(two_f):
        q = d + 1
        if q > 2 and _is_prime_small(q):
            M *= q ** (fac.get(q, 0) + 1)
    return M


def _is_prime_small(n: int) -> bool:
    from .fq_arith import is_prime
    return is_prime(n)


def _divisors(n: int) -> list[int]:
    divs = [1]
    for q, s in factor_int(n).items():
        divs = [d * q**e for d in divs for e in range(s + 1)]
    return sorted(divs)


@lru_cache(maxsize=None)
def preimage_lambda_prime(f: int) -> frozenset:
    """{N >= 3 : lambda'(N) = f}, enumerated over the divisors of M(f)."""
    _check_n(f, "f")
    return frozenset(N for N in _divisors(enumeration_bound(f)) if N >= 3 and lambda_prime(N) == f)


def Z(f: int) -> int:
    """Number of f-periodic points of the flow on P^1 (images of torsion)."""
    _check_n(f, "f")
    if f == 1:
        return 26
    return sum(phi2(N) for N in preimage_lambda_prime(f)) // 2


def Z_formula_sum(f: int) -> int:
    """The sum over lambda'^(-1)(f) with the two-torsion stratum made explicit.

    For f = 1 this is 4 + (phi2(3) + phi2(4) + phi2(6))/2, the derivation of 26.
    """
    _check_n(f, "f")
    base = sum(phi2(N) for N in preimage_lambda_prime(f)) // 2
    return base + (4 if f == 1 else 0)


# =============================================================================
# weights
# =============================================================================

@dataclass(frozen=True)
class WeightTuple:
    """(alpha_0, alpha_1, alpha_lam, alpha_inf), rationals in [0, 1)."""

    alphas: tuple

    def __post_init__(self):
        if len(self.alphas) != 4:
            raise BadInput("a weight tuple has four entries")
        vals = []
        for a in self.alphas:
            try:
                fa = Fraction(a)
            except (TypeError, ValueError) as exc:
                raise BadInput(f"not a rational weight: {a!r}") from exc
            if not 0 <= fa < 1:
                raise BadInput(f"weight {fa} outside [0, 1)")
            vals.append(fa)
        object.__setattr__(self, "alphas", tuple(vals))

    @classmethod
    def parse(cls, text: str) -> "WeightTuple":
        parts = [s.strip() for s in text.split(",")]
        return cls(tuple(parts))

    @property
    def denominators(self) -> tuple:
        return tuple(a.denominator for a in self.alphas)

    @property
    def N(self) -> int:
        return _lcm(self.denominators)

    def __str__(self) -> str:
        return ",".join(str(a) for a in self.alphas)


def Lambda_alpha(alpha: WeightTuple) -> int:
    return carmichael(alpha.N)


def count_M_alpha(alpha: WeightTuple, f: int) -> int:
    """Number of Lambda_alpha * f periodic points in M_alpha.

    Periods transform by g -> lcm(Lambda_alpha, g), so this is the sum of Z(g)
    over divisors g of Lambda_alpha * f with lcm(Lambda_alpha, g) = Lambda_alpha * f.
    """
    _check_n(f, "f")
    L = Lambda_alpha(alpha)
    target = L * f
    return sum(Z(g) for g in _divisors(target) if _lcm((L, g)) == target)


def count_M_alpha_display(alpha: WeightTuple, f: int) -> int:
    """The displayed divisor sum, read with one independent index per prime.

    Primes p_i range over those dividing Lambda_alpha * f; for p_i not dividing
    f the index j_i runs over 0..s(Lambda_alpha)_i, for p_i | f it is fixed at
    0, and the indices combine as a product: Z(Lambda_alpha f / prod p_i^j_i).
    """
    _check_n(f, "f")
    L = Lambda_alpha(alpha)
    target = L * f
    sL = factor_int(L) if L > 1 else {}
    free = [q for q in sL if f % q]
    total = 0
    for js in itertools.product(*[range(sL[q] + 1) for q in free]):
        d = 1
        for q, j in zip(free, js):
            d *= q**j
        total += Z(target // d)
    return total


def count_M_alpha_report(alpha: WeightTuple, f: int) -> dict:
    a, b = count_M_alpha(alpha, f), count_M_alpha_display(alpha, f)
    return {"alpha": str(alpha), "f": f, "Lambda": Lambda_alpha(alpha), "count": a,
            "display_count": b, "agree": a == b}


# =============================================================================
# records / tables
# =============================================================================

@dataclass(frozen=True)
class PeriodRecord:
    N: int
    carmichael: int
    lambda_prime: int
    phi2: int

    @classmethod
    def of(cls, N: int) -> "PeriodRecord":
        return cls(N, carmichael(N), lambda_prime(N), phi2(N))


PERIOD_FIELDS = ["N", "carmichael", "lambda_prime", "phi2", "carmichael_oracle",
                 "lambda_prime_oracle", "phi2_oracle"]
Z_FIELDS = ["f", "Z", "Z_oracle", "preimage"]


def period_table(N_max: int, oracle_limit: int = 500) -> list[dict]:
    rows = []
    for N in range(1, N_max + 1):
        r = asdict(PeriodRecord.of(N))
        small = N <= oracle_limit
        r["carmichael_oracle"] = brute_carmichael(N) if small else ""
        r["lambda_prime_oracle"] = brute_lambda_prime(N) if small else ""
        r["phi2_oracle"] = brute_phi2(N) if small and N <= 200 else ""
        rows.append(r)
    return rows


def z_table(f_values: Sequence[int]) -> list[dict]:
    return [{"f": f, "Z": Z(f), "Z_oracle": Z_oracle(f),
             "preimage": " ".join(str(n) for n in sorted(preimage_lambda_prime(f)))}
            for f in f_values]


def to_csv(rows: list[dict], fields: Sequence[str]) -> str:
    buf = io.StringIO()
    w = csv.DictWriter(buf, fieldnames=list(fields), lineterminator="\n")
    w.writeheader()
    for r in rows:
        w.writerow({k: r.get(k, "") for k in fields})
    return buf.getvalue()


# =============================================================================
# brute-force oracles
# =============================================================================

def _units(N: int) -> list[int]:
    return [g for g in range(1, N + 1) if math.gcd(g, N) == 1] if N > 1 else [0]


def brute_carmichael(N: int) -> int:
    """Least e >= 1 with g^e = 1 for all units g (powers of every unit, in lockstep)."""
    _check_n(N)
    if N <= 2:
        return 1
    units = np.array(_units(N), dtype=np.int64)
    pw, e = units.copy(), 1
    while np.any(pw != 1):
        pw = pw * units % N
        e += 1
    return e


def brute_lambda_prime(N: int) -> int:
    """Least f >= 1 with g^f = +-1 mod N for all units g (1 for N <= 2)."""
    _check_n(N)
    if N <= 2:
        return 1
    units = np.array(_units(N), dtype=np.int64)
    pw, f = units.copy(), 1
    while np.any((pw != 1) & (pw != N - 1)):
        pw = pw * units % N
        f += 1
    return f


def brute_phi2(N: int) -> int:
    """Exact-order-N elements of (Z/N)^2 counted directly."""
    _check_n(N)
    cnt = 0
    for a in range(N):
        for b in range(N):
            if math.gcd(math.gcd(a, b), N) == 1:
                cnt += 1
    return cnt


# -- CRT-based oracle for Z(f) -----------------------------------------------

@lru_cache(maxsize=None)
def _component(qs: int) -> tuple:
    """Brute data of U_{q^s}: (exponent, order, {f: U^f as a frozenset})-builder."""
    units = _units(qs)
    return tuple(units)


@lru_cache(maxsize=None)
def _component_power_kind(qs: int, f: int) -> int:
    """0 if U^f = {1}; 1 if U^f = {1, -1} with -1 != 1; 2 otherwise."""
    if qs <= 2:
        return 0
    img = {pow(g, f, qs) for g in _component(qs)}
    if img == {1}:
        return 0
    if img == {1, qs - 1}:
        return 1
    return 2


def _crt_lambda_prime(components: Sequence[int], f_max: int) -> Optional[int]:
    """Least f <= f_max with U_N^f in {+-1}, from per-component brute images."""
    big = [c for c in components if c > 2]
    for f in range(1, f_max + 1):
        kinds = [_component_power_kind(c, f) for c in components]
        if any(k == 2 for k in kinds):
            continue
        ones = sum(1 for k in kinds if k == 1)
        if ones == 0 or (ones == 1 and len(big) == 1):
            return f
    return None


@lru_cache(maxsize=None)
def _component_phi2(qs: int) -> int:
    return brute_phi2(qs) if qs <= 150 else None  # type: ignore[return-value]


def _component_candidates(f: int) -> dict[int, list[int]]:
    """Prime powers q^s whose unit group has exponent dividing 2f (brute)."""
    out: dict[int, list[int]] = {}
    for q in range(2, 2 * f + 2):
        if not _is_prime_small(q):
            continue
        s, powers = 1, []
        while True:
            qs = q**s
            if (2 * f) % brute_carmichael(qs):
                break
            powers.append(qs)
            s += 1
        if powers:
            out[q] = powers
    return out


def _phi2_crt(components: Sequence[int]) -> int:
    out = 1
    for c in components:
        v = _component_phi2(c)
        if v is None:  # large prime power: count pairs not both divisible by q
            q = min(factor_int(c))
            v = c * c - (c // q) ** 2
        out *= v
    return out


def periodic_orders_oracle(f: int) -> dict[int, int]:
    """{N >= 3 : lambda'(N) = f} with phi2(N), by CRT over brute components."""
    _check_n(f, "f")
    cands = _component_candidates(f)
    primes = sorted(cands)
    out = {}
    for choice in itertools.product(*[[1] + cands[q] for q in primes]):
        comps = [c for c in choice if c > 1]
        N = math.prod(comps)
        if N < 3:
            continue
        if _crt_lambda_prime(comps, f) == f:
            out[N] = _phi2_crt(comps)
    return out


def Z_oracle(f: int) -> int:
    """Torsion enumeration: 4 two-torsion images (f = 1) plus phi2(N)/2 over N >= 3."""
    orders = periodic_orders_oracle(f)
    return sum(orders.values()) // 2 + (4 if f == 1 else 0)


def brute_Lambda_alpha(alpha: WeightTuple) -> int:
    """lcm over nonzero weights m/N of the least e with u^e m = m mod N for all units u."""
    vals = []
    for a in alpha.alphas:
        if a == 0:
            continue
        m, N = a.numerator, a.denominator
        e = 1
        units = _units(N)
        while not all(pow(u, e, N) * m % N == m % N for u in units):
            e += 1
        vals.append(e)
    return _lcm(vals)


def count_M_alpha_oracle(alpha: WeightTuple, f: int) -> int:
    """Direct period-lcm enumeration over torsion orders N (brute components)."""
    L = brute_Lambda_alpha(alpha)
    target = L * f
    total = 4 if _lcm((L, 1)) == target else 0
    for g in range(1, target + 1):
        if target % g:
            continue
        if _lcm((L, g)) != target:
            continue
        total += sum(periodic_orders_oracle(g).values()) // 2
    return total
