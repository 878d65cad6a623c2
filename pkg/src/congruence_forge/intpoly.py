"""Dense integer-coefficient polynomial kernel.

Coefficient vectors are plain lists/tuples of Python ints indexed by degree.
This module is the shared engine under both the truncated q-series ring and
the localized polynomial ring: convolution (schoolbook below a threshold,
Kronecker substitution through one GMP product above it), exact divisions,
and small helpers. Everything is exact integer arithmetic.
"""

from __future__ import annotations

import gmpy2

# Shapes where schoolbook beats the packing overhead: tiny balanced products
# never amortize the pack/unpack pass, and a thin operand with moderate
# coefficients keeps the quadratic loop effectively linear. Once coefficients
# grow past ~4k combined bits, GMP's subquadratic products win even when thin.
_THIN_OPERAND = 6
_THIN_BITS = 4096
_SCHOOLBOOK_CUTOFF = 256


def trim(c: list[int]) -> list[int]:
    """Drop trailing zero coefficients in place; return the list."""
    while c and c[-1] == 0:
        c.pop()
    return c


def add(a, b) -> list[int]:
    if len(a) < len(b):
        a, b = b, a
    out = list(a)
    for i, v in enumerate(b):
        out[i] += v
    return trim(out)


def sub(a, b) -> list[int]:
    out = list(a) + [0] * max(0, len(b) - len(a))
    for i, v in enumerate(b):
        out[i] -= v
    return trim(out)


def scale(a, s: int) -> list[int]:
    if s == 0:
        return []
    return [c * s for c in a]


def _schoolbook(a, b, out_len: int) -> list[int]:
    out = [0] * out_len
    for i, c in enumerate(a):
        if c == 0:
            continue
        jmax = min(len(b), out_len - i)
        for j in range(jmax):
            d = b[j]
            if d:
                out[i + j] += c * d
    return out


def _kronecker(a, b, out_len: int) -> list[int]:
    """Signed Kronecker substitution: pack in balanced base 2**B, one GMP mul."""
    ma = max(max(a), -min(a))
    mb = max(max(b), -min(b))
    if ma == 0 or mb == 0:
        return [0] * out_len
    # chunks must hold both the input digits and the convolved digits
    bound = max(ma * mb * min(len(a), len(b)), ma, mb)
    width = ((bound.bit_length() + 2 + 7) // 8) * 8
    while (1 << (width - 1)) <= bound:
        width += 8
    bw = width // 8

    def pack(coeffs):
        pos = bytearray(bw * len(coeffs))
        neg = bytearray(bw * len(coeffs))
        for i, c in enumerate(coeffs):
            if c > 0:
                pos[i * bw : i * bw + bw] = c.to_bytes(bw, "little")
            elif c < 0:
                neg[i * bw : i * bw + bw] = (-c).to_bytes(bw, "little")
        return int.from_bytes(pos, "little") - int.from_bytes(neg, "little")

    prod = int(gmpy2.mpz(pack(a)) * gmpy2.mpz(pack(b)))
    n_out = len(a) + len(b) - 1
    half = 1 << (width - 1)
    offset_chunk = (b"\x00" * (bw - 1)) + b"\x80"
    offset = int.from_bytes(offset_chunk * n_out, "little")
    raw = (prod + offset).to_bytes(bw * n_out, "little")
    take = min(out_len, n_out)
    return [
        int.from_bytes(raw[i * bw : i * bw + bw], "little") - half
        for i in range(take)
    ] + [0] * (out_len - take)


def convolve(a, b, out_len: int | None = None) -> list[int]:
    """Product of integer coefficient vectors, truncated to out_len entries."""
    if not a or not b:
        return []
    full = len(a) + len(b) - 1
    if out_len is None or out_len > full:
        out_len = full
    if out_len <= 0:
        return []
    # Only the leading out_len coefficients of each operand can contribute.
    if len(a) > out_len:
        a = a[:out_len]
    if len(b) > out_len:
        b = b[:out_len]
    if len(a) * len(b) <= _SCHOOLBOOK_CUTOFF:
        return _schoolbook(a, b, out_len)
    if min(len(a), len(b)) <= _THIN_OPERAND:
        bits = max((c.bit_length() for c in a), default=0) + max(
            (c.bit_length() for c in b), default=0
        )
        if bits <= _THIN_BITS:
            return _schoolbook(a, b, out_len)
    return _kronecker(a, b, out_len)


def mul(a, b) -> list[int]:
    return trim(convolve(a, b))


def pow_(a, e: int) -> list[int]:
    if e < 0:
        raise ValueError("negative exponent on a plain polynomial")
    result = [1]
    base = list(a)
    while e:
        if e & 1:
            result = mul(result, base)
        e >>= 1
        if e:
            base = mul(base, base)
    return result


def exact_div_scalar(a, s: int) -> list[int]:
    """Divide every coefficient by s; raise if any division is inexact."""
    out = []
    for c in a:
        q, r = divmod(c, s)
        if r:
            raise ArithmeticError(f"coefficient {c} not divisible by {s}")
        out.append(q)
    return out


def exact_div_one_plus_9x(a) -> list[int]:
    """Exact quotient a / (1 + 9x); raise if (1+9x) does not divide a."""
    if not a:
        return []
    out = [0] * (len(a) - 1)
    carry = 0
    for j in range(len(a) - 1):
        q = a[j] - 9 * carry
        out[j] = q
        carry = q
    if a[-1] != 9 * carry:
        raise ArithmeticError("polynomial not divisible by 1+9x")
    return trim(out)


def one_plus_9x_pow(n: int) -> list[int]:
    """(1+9x)**n as an integer coefficient vector."""
    return pow_([1, 9], n)


def content_gcd(a, seed: int = 0) -> int:
    """gcd of all coefficients (and seed); early exit at 1."""
    import math

    g = seed
    for c in a:
        g = math.gcd(g, c)
        if g == 1:
            return 1
    return g
