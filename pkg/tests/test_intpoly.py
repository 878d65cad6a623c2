"""Kernel checks: the fast convolution path must agree with schoolbook."""

from hypothesis import given, settings, strategies as st

from congruence_forge import intpoly


coeffs = st.lists(st.integers(min_value=-(10**40), max_value=10**40), min_size=1, max_size=120)


def naive(a, b):
    out = [0] * (len(a) + len(b) - 1)
    for i, c in enumerate(a):
        for j, d in enumerate(b):
            out[i + j] += c * d
    return out


@given(coeffs, coeffs)
@settings(max_examples=120, deadline=None)
def test_kronecker_matches_schoolbook(a, b):
    assert intpoly._kronecker(a, b, len(a) + len(b) - 1) == naive(a, b)


@given(coeffs, coeffs, st.integers(min_value=1, max_value=40))
@settings(max_examples=60, deadline=None)
def test_truncated_convolve(a, b, out_len):
    full = naive(a, b)
    got = intpoly.convolve(a, b, out_len)
    got = got + [0] * (out_len - len(got))
    want = (full + [0] * out_len)[:out_len]
    assert got == want


def test_exact_divisions():
    p = intpoly.mul([1, 9], [3, -7, 11])
    assert intpoly.exact_div_one_plus_9x(p) == [3, -7, 11]
    try:
        intpoly.exact_div_one_plus_9x([1, 1])
        assert False
    except ArithmeticError:
        pass
    assert intpoly.exact_div_scalar([9, -27], 9) == [1, -3]
    try:
        intpoly.exact_div_scalar([10], 9)
        assert False
    except ArithmeticError:
        pass


def test_one_plus_9x_pow():
    assert intpoly.one_plus_9x_pow(0) == [1]
    assert intpoly.one_plus_9x_pow(2) == [1, 18, 81]
