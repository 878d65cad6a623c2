"""Series ring: worked examples with independent oracles, then the ring and
operator laws as property tests."""

from fractions import Fraction as F

import pytest
from hypothesis import assume, given, settings, strategies as st

from congruence_forge.series import (
    EtaQuotient,
    FractionalPowerError,
    NotInvertibleError,
    PrecisionError,
    QSeries,
    a_series,
    dk_series,
    eta_quotient_series,
    pochhammer_series,
    series_arith,
    x_quotient,
    x_series,
    z_series,
)


# ---------------------------------------------------------------------------
# independent oracles
# ---------------------------------------------------------------------------


def conv_oracle(a: dict, b: dict) -> dict:
    """Brute-force convolution on exponent->coefficient dicts."""
    out = {}
    for i, c in a.items():
        for j, d in b.items():
            out[i + j] = out.get(i + j, 0) + c * d
    return {k: v for k, v in out.items() if v}


def partitions_brute(n: int) -> int:
    """Count partitions by direct recursive enumeration."""

    def count(rest, largest):
        if rest == 0:
            return 1
        return sum(count(rest - k, k) for k in range(1, min(rest, largest) + 1))

    return count(n, n)


def product_expansion_brute(exps: dict, terms: int) -> list:
    """Expand prod (q^d;q^d)^{r_d} by naive factor-at-a-time polynomial work,
    independently of the QSeries machinery."""
    out = [F(0)] * terms
    out[0] = F(1)
    for d, r in exps.items():
        for n in range(1, terms // d + 1):
            for _ in range(abs(r)):
                if r > 0:  # multiply by (1 - q^{dn})
                    for e in range(terms - 1, d * n - 1, -1):
                        out[e] -= out[e - d * n]
                else:  # divide by (1 - q^{dn}): cumulative sums
                    for e in range(d * n, terms):
                        out[e] += out[e - d * n]
    return out


# ---------------------------------------------------------------------------
# worked examples
# ---------------------------------------------------------------------------


def test_difference_of_squares():
    a = QSeries.from_ints([1, 1], 10)
    b = QSeries.from_ints([1, -1], 10)
    assert [(a * b).coeff(i) for i in range(3)] == [1, 0, -1]


def test_additive_identity():
    a = QSeries.from_ints([3, 0, 2], 12)
    assert (a + QSeries.zero(12)).matches(a)


def test_laurent_product_against_convolution_oracle():
    a = QSeries(-1, [1, 1], 5)          # q^-1 + 1
    b = QSeries(1, [1, 1], 7)           # q + q^2
    want = conv_oracle({-1: 1, 0: 1}, {1: 1, 2: 1})
    got = a * b
    assert all(got.coeff(e) == want.get(e, 0) for e in range(-2, got.prec))
    assert [got.coeff(e) for e in (0, 1, 2)] == [1, 2, 1]


def test_inverse_geometric():
    inv = QSeries.from_ints([1, -1], 12).inverse()
    assert all(inv.coeff(i) == 1 for i in range(12))


def test_inverse_euler_product_counts_partitions():
    p = pochhammer_series(1, 12).inverse()
    assert p.coeff(4) == partitions_brute(4) == 5
    assert [int(p.coeff(i)) for i in range(8)] == [partitions_brute(i) for i in range(8)]


def test_inverse_constant():
    assert QSeries.from_ints([2], 6).inverse().coeff(0) == F(1, 2)


def test_inverse_zero_rejected():
    with pytest.raises(NotInvertibleError, match="not invertible"):
        QSeries.zero(5).inverse()


def test_pow_examples():
    a = QSeries.from_ints([1, 1], 9)
    sq = a.pow(2)
    assert [sq.coeff(i) for i in range(3)] == [1, 2, 1]
    assert a.pow(0).coeff(0) == 1


def test_dk_weight_matches_brute_force_expansion():
    # the k=2 product to 12 terms, brute-forced factor by factor
    want = product_expansion_brute({1: -7, 2: 2}, 12)
    got = dk_series(2, 12)
    assert [got.coeff(i) for i in range(12)] == want
    assert got.coeff(2) == 33


def test_substitute_examples():
    q = QSeries.monomial(1, 5)
    assert q.substitute_q_power(3).coeff(3) == 1
    s = QSeries.from_ints([1, 1, 1], 3).substitute_q_power(2)
    assert [s.coeff(i) for i in range(6)] == [1, 0, 1, 0, 1, 0]


def test_substitute_matches_scaled_eta_expansion():
    xs3 = x_series(14).substitute_q_power(3)
    scaled = EtaQuotient(6, x_quotient().exponents, scale=3).at_level(18).series(42)
    assert xs3.matches(scaled, upto=40)


def test_u3_examples():
    assert QSeries.monomial(3, 12).u3().coeff(1) == 1
    ones = QSeries.from_ints([1] * 12, 12)
    assert ones.u3().matches(QSeries.from_ints([1] * 4, 4))
    assert a_series(13).u3().coeff(1) == 33


def test_u3_valuation_and_precision():
    f = QSeries(-6, [1] + [0] * 17 + [2], 30)  # support at q^-6 and q^12
    g = f.u3()
    assert g.prec == 10  # ceil(30/3)
    assert g.valuation == -2  # ceil(-6/3)
    assert g.coeff(-2) == 1 and g.coeff(4) == 2


def test_eta_quotient_examples():
    xs = x_series(20)
    assert xs.valuation == 1 and xs.coeff(1) == 1
    assert eta_quotient_series(EtaQuotient(6, {}), 9).matches(QSeries.one(9))
    zs = z_series(20)
    assert (zs - QSeries.one(20) - xs.scale(9)).is_zero()


def test_eta_quotient_inverse_cancels():
    xq = x_quotient()
    prod = xq.series(16) * xq.inverse().series(16)
    assert prod.matches(QSeries.one(16), upto=12)


def test_eta_fractional_prefactor_rejected():
    with pytest.raises(FractionalPowerError, match="fractional q-power"):
        EtaQuotient(2, {1: 1, 2: 1}).series(5)


def test_eta_invalid_divisor_rejected():
    with pytest.raises(ValueError):
        EtaQuotient(6, {4: 1})


def test_dk_examples():
    assert dk_series(0, 6).coeff(4) == 5
    assert dk_series(2, 3).coeff(0) == 1
    assert dk_series(2, 3).coeff(2) == 33


def test_dk_nonnegative_integers():
    for k in range(4):
        s = dk_series(k, 200)
        assert s.is_integral()
        assert all(s.coeff(n) >= 0 for n in range(200))


def test_z_is_one_mod_nine():
    zs = z_series(200)
    assert zs.coeff(0) == 1
    assert all(int(zs.coeff(n)) % 9 == 0 for n in range(1, 200))


def test_precision_contract():
    a = QSeries.from_ints([1, 2, 3], 3)
    with pytest.raises(PrecisionError):
        a.coeff(3)
    b = a * a  # precision stays 3
    assert b.prec == 3
    with pytest.raises(PrecisionError):
        b.coeff(3)
    with pytest.raises(ValueError):
        QSeries(5, [1], 3)


def test_series_arith_dispatch():
    a = QSeries.from_ints([1, 1], 8)
    assert series_arith(a, a, "sub").is_zero()
    assert series_arith(a, F(3, 2), "scale").coeff(0) == F(3, 2)
    assert series_arith(a, 2, "shift").valuation == 2
    with pytest.raises(ValueError):
        series_arith(a, a, "compose")


# ---------------------------------------------------------------------------
# property tests
# ---------------------------------------------------------------------------

small_series = st.builds(
    lambda val, coeffs, pad: QSeries(val, coeffs, val + len(coeffs) + pad),
    st.integers(min_value=-4, max_value=4),
    st.lists(st.integers(min_value=-50, max_value=50), min_size=1, max_size=8),
    st.integers(min_value=0, max_value=3),
)


@given(small_series, small_series, small_series)
@settings(max_examples=120, deadline=None)
def test_ring_axioms(a, b, c):
    assert ((a + b) + c).matches(a + (b + c))
    assert (a + b).matches(b + a)
    try:
        assert ((a * b) * c).matches(a * (b * c))
        assert (a * b).matches(b * a)
        assert (a * (b + c)).matches(a * b + a * c)
    except PrecisionError:
        assume(False)


@given(
    small_series,
    small_series,
    st.fractions(min_value=-30, max_value=30, max_denominator=9),
)
@settings(max_examples=100, deadline=None)
def test_u3_linearity(f, g, alpha):
    lhs = (f.scale(alpha) + g).u3()
    rhs = f.u3().scale(alpha) + g.u3()
    try:
        assert lhs.matches(rhs)
    except PrecisionError:
        assume(False)


@given(small_series, small_series)
@settings(max_examples=100, deadline=None)
def test_u3_sifting(f, g):
    lhs = (f.substitute_q_power(3) * g).u3()
    rhs = f * g.u3()
    try:
        assert lhs.matches(rhs)
    except PrecisionError:
        assume(False)


@given(small_series)
@settings(max_examples=60, deadline=None)
def test_mul_valuation_bound(a):
    assume(not a.is_zero())
    prod = a * a
    if not prod.is_zero():
        assert prod.valuation >= 2 * a.valuation
