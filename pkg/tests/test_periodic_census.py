import math

import numpy as np
import pytest

from syzflow.errors import BadInput
from syzflow.fq_arith import is_prime
from syzflow.periodic_census import (PERIOD_FIELDS, Z, Z_FIELDS, Lambda_alpha, PeriodRecord, WeightTuple, Z_formula_sum,
                                     Z_oracle, brute_carmichael, brute_Lambda_alpha, brute_lambda_prime, brute_phi2,
                                     carmichael, count_M_alpha, count_M_alpha_display, count_M_alpha_oracle,
                                     count_M_alpha_report, enumeration_bound, lambda_prime, period_table,
                                     periodic_orders_oracle, phi2, preimage_lambda_prime, to_csv, units_cyclic,
                                     z_table)

W = WeightTuple.parse


# -- examples --------------------------------------------------------------

def test_carmichael_examples():
    assert (carmichael(8), carmichael(5), carmichael(24)) == (2, 4, 2)
    assert carmichael(4) == 2 and carmichael(1) == 1 and carmichael(2) == 1


def test_lambda_prime_examples():
    assert (lambda_prime(5), lambda_prime(8), lambda_prime(2), lambda_prime(1)) == (2, 2, 1, 1)


def test_phi2_examples():
    assert (phi2(1), phi2(3), phi2(4), phi2(6)) == (1, 8, 12, 24)


def test_preimage_examples():
    assert preimage_lambda_prime(1) == {3, 4, 6}
    assert preimage_lambda_prime(2) == {5, 8, 10, 12, 24}
    assert preimage_lambda_prime(7) == frozenset()


def test_z_examples():
    assert Z(1) == 26 and Z_formula_sum(1) == 26
    assert Z(2) == 312 == (24 + 48 + 72 + 96 + 384) // 2
    assert Z(7) == 0


def test_lambda_alpha_examples():
    assert Lambda_alpha(W("1/2,0,0,0")) == 1
    assert Lambda_alpha(W("1/3,1/3,1/3,1/2")) == 2
    assert Lambda_alpha(W("0,0,0,0")) == 1


def test_count_m_alpha_examples():
    for f in range(1, 9):
        assert count_M_alpha(W("0,0,0,0"), f) == Z(f)
        assert count_M_alpha(W("1/2,0,0,0"), f) == Z(f)
    assert count_M_alpha(W("1/3,0,0,0"), 1) == 338 == 26 + 312


def test_bad_inputs():
    for fn in (carmichael, lambda_prime, phi2, preimage_lambda_prime, Z):
        with pytest.raises(BadInput):
            fn(0)
    with pytest.raises(BadInput):
        W("1/2,0,0")
    with pytest.raises(BadInput):
        W("3/2,0,0,0")
    with pytest.raises(BadInput):
        W("x,0,0,0")


def test_weight_tuple():
    w = W("2/6, 0, 1/4, 1/3")
    assert str(w) == "1/3,0,1/4,1/3"
    assert w.denominators == (3, 1, 4, 3)
    assert w.N == 12


# -- formula vs brute force ----------------------------------------------------

def test_carmichael_brute_to_1000():
    assert all(carmichael(N) == brute_carmichael(N) for N in range(1, 1001))


def test_lambda_prime_brute_to_500():
    assert all(lambda_prime(N) == brute_lambda_prime(N) for N in range(1, 501))


def test_phi2_brute_to_200():
    assert all(phi2(N) == brute_phi2(N) for N in range(1, 201))


def test_phi2_multiplicative():
    for m in range(1, 101):
        for n in range(1, 101):
            if math.gcd(m, n) == 1:
                assert phi2(m * n) == phi2(m) * phi2(n)


def test_units_cyclic_matches_primitive_root_search():
    for N in range(1, 300):
        units = [g for g in range(1, N + 1) if math.gcd(g, N) == 1]
        phi = len(units)
        has_root = any(all(pow(g, phi // q, N) != 1 % N for q in {q for q in range(2, phi + 1)
                                                                     if phi % q == 0 and is_prime(q)})
                       for g in units)
        assert units_cyclic(N) == (has_root or N <= 2)


def test_period_record_invariants():
    for N in range(1, 400):
        r = PeriodRecord.of(N)
        assert r.lambda_prime in (r.carmichael, r.carmichael // 2) or N <= 2
        if N >= 3:
            assert r.carmichael % r.lambda_prime == 0
        assert r.phi2 <= N * N


def test_dirichlet_consistency():
    primes = [q for q in range(3, 2000) if is_prime(q)]
    for N in range(3, 51):
        chosen = [q for q in primes if (2 * N) % q][:25]
        orders = []
        for q in chosen:
            f, x = 1, q % N
            while x not in (1, N - 1):
                x = x * q % N
                f += 1
            orders.append(f)
        assert math.lcm(*orders) == lambda_prime(N)


# -- Z(f) census ---------------------------------------------------------------

Z_1_TO_20 = [26, 312, 240, 28464, 240, 126816, 0, 86976, 2016, 35520, 1056, 2146279344, 0, 1680, 1920,
             133055424, 0, 412522704, 0, 87058800]


def test_z_closed_form_equals_enumeration_oracle():
    got = [Z(f) for f in range(1, 21)]
    assert got == [Z_oracle(f) for f in range(1, 21)]
    assert got == Z_1_TO_20


def test_enumeration_bound_complete_against_crt_oracle():
    for f in range(1, 31):
        pre = preimage_lambda_prime(f)
        assert set(periodic_orders_oracle(f)) == set(pre)
        assert all(enumeration_bound(f) % N == 0 for N in pre)


def _lambda_prime_sieve(L):
    """lambda'(N) for all N <= L from a smallest-prime-factor sieve."""
    spf = np.zeros(L + 1, dtype=np.int64)
    for q in range(2, L + 1):
        if spf[q] == 0:
            spf[q::q][spf[q::q] == 0] = q
    out = [0] * (L + 1)
    for N in range(1, L + 1):
        if N <= 2:
            out[N] = 1
            continue
        n, parts, odd, two = N, [], 0, 0
        while n > 1:
            q = int(spf[n])
            s = 0
            while n % q == 0:
                n //= q
                s += 1
            if q == 2:
                two = s
                parts.append(2 ** max(0, s - 2) if s != 2 else 2)
            else:
                odd += 1
                parts.append((q - 1) * q ** (s - 1))
        lam = math.lcm(*parts)
        cyclic = N == 4 or (odd == 1 and two <= 1)
        out[N] = lam // 2 if cyclic else lam
    return out


def test_no_period_beyond_enumeration_bound():
    L = 300_000
    lp = _lambda_prime_sieve(L)
    assert all(lp[N] == lambda_prime(N) for N in range(1, 3000))
    for f in range(1, 31):
        M = enumeration_bound(f)
        hits = {N for N in range(3, min(10 * M, L) + 1) if lp[N] == f}
        assert all(N <= M for N in hits)
        assert hits == {N for N in preimage_lambda_prime(f) if N <= L}


# -- M_alpha -------------------------------------------------------------------

ALPHAS = ["1/2,0,0,0", "1/3,0,0,0", "1/4,0,0,0", "1/5,0,0,0", "1/3,1/3,1/3,1/2", "1/7,0,0,0",
          "1/8,1/2,0,0", "1/9,0,0,0", "1/5,1/2,0,0", "1/12,0,1/4,0", "1/11,0,0,0", "0,0,0,0"]


@pytest.mark.parametrize("alpha", ALPHAS)
def test_lambda_alpha_matches_brute(alpha):
    assert Lambda_alpha(W(alpha)) == brute_Lambda_alpha(W(alpha))


@pytest.mark.parametrize("alpha", ALPHAS)
def test_count_m_alpha_matches_oracle(alpha):
    w = W(alpha)
    for f in range(1, 7):
        assert count_M_alpha(w, f) == count_M_alpha_oracle(w, f)


def test_count_m_alpha_display_cross_check():
    rows = [count_M_alpha_report(W(a), f) for a in ALPHAS for f in range(1, 7)]
    assert all(r["agree"] for r in rows)
    assert count_M_alpha_display(W("1/3,0,0,0"), 1) == 338


# -- tables ----------------------------------------------------------------

def test_tables_and_csv():
    rows = z_table([1, 2, 7])
    assert [(r["f"], r["Z"], r["Z_oracle"], r["preimage"]) for r in rows] == \
        [(1, 26, 26, "3 4 6"), (2, 312, 312, "5 8 10 12 24"), (7, 0, 0, "")]
    text = to_csv(rows, Z_FIELDS)
    assert text.splitlines()[0] == "f,Z,Z_oracle,preimage"
    assert text.splitlines()[1] == "1,26,26,3 4 6"
    ptab = period_table(12)
    assert ptab[7] == {"N": 8, "carmichael": 2, "lambda_prime": 2, "phi2": 48, "carmichael_oracle": 2,
                       "lambda_prime_oracle": 2, "phi2_oracle": 48}
    assert to_csv(ptab, PERIOD_FIELDS).splitlines()[0] == ",".join(PERIOD_FIELDS)
