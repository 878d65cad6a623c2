"""Exact truncated Laurent q-series and eta-quotient expansion.

A QSeries stores coefficients for exponents val .. prec-1 as integers over a
single common denominator, so the common integer-series case costs nothing
extra and every coefficient is an exact rational. Exponents >= prec are
unknown (not zero); all operations propagate the tightest correct precision
and refuse to report coefficients beyond it.
"""

from __future__ import annotations

import math
from fractions import Fraction
from functools import lru_cache

from . import intpoly


class PrecisionError(Exception):
    """A coefficient or comparison was requested beyond known precision."""


class NotInvertibleError(ZeroDivisionError):
    """Raised for inversion of the zero series: 'not invertible'."""


class FractionalPowerError(ValueError):
    """Eta-quotient expansion with a non-integral q-power prefactor."""


def _as_int_den(values) -> tuple[list[int], int]:
    """Normalize a sequence of ints/Fractions to (numerators, common den)."""
    fracs = [Fraction(v) for v in values]
    den = 1
    for f in fracs:
        den = den * f.denominator // math.gcd(den, f.denominator)
    return [int(f * den) for f in fracs], den


class QSeries:
    """Truncated Laurent series in q with exact rational coefficients."""

    __slots__ = ("val", "prec", "coeffs", "den")

    def __init__(self, val: int, coeffs, prec: int, den: int = 1):
        if den == 0:
            raise ZeroDivisionError("zero denominator")
        coeffs = list(coeffs)
        if any(isinstance(c, Fraction) for c in coeffs):
            coeffs, extra = _as_int_den(coeffs)
            den *= extra
        if den < 0:
            den = -den
            coeffs = [-c for c in coeffs]
        # nonzero coefficients at exponents >= prec contradict the contract
        if len(coeffs) > prec - val:
            if any(coeffs[max(0, prec - val):]):
                raise ValueError("nonzero coefficient at an exponent beyond the precision")
            coeffs = coeffs[: max(0, prec - val)]
        lead = 0
        while lead < len(coeffs) and coeffs[lead] == 0:
            lead += 1
        val += lead
        coeffs = coeffs[lead:]
        while coeffs and coeffs[-1] == 0:
            coeffs.pop()
        if not coeffs:
            val = prec
        elif den > 1:
            g = intpoly.content_gcd(coeffs, den)
            if g > 1:
                coeffs = [c // g for c in coeffs]
                den //= g
        if coeffs and prec <= val:
            raise ValueError("precision must exceed valuation for a nonzero series")
        self.val = val
        self.prec = prec
        self.coeffs = tuple(coeffs)
        self.den = den

    # ----- constructors -----

    @classmethod
    def zero(cls, prec: int) -> "QSeries":
        return cls(prec, [], prec)

    @classmethod
    def one(cls, prec: int) -> "QSeries":
        return cls(0, [1], prec)

    @classmethod
    def monomial(cls, exponent: int, prec: int, coeff=1) -> "QSeries":
        return cls(exponent, [coeff], prec)

    @classmethod
    def from_ints(cls, coeffs, prec: int | None = None, val: int = 0) -> "QSeries":
        if prec is None:
            prec = val + len(coeffs)
        return cls(val, coeffs, prec)

    # ----- inspection -----

    @property
    def valuation(self) -> int | None:
        """Lowest exponent with nonzero coefficient, or None for the zero series."""
        return self.val if self.coeffs else None

    def is_zero(self) -> bool:
        return not self.coeffs

    def coeff(self, n: int) -> Fraction:
        if n >= self.prec:
            raise PrecisionError(f"coefficient of q^{n} unknown (precision {self.prec})")
        i = n - self.val
        if i < 0 or i >= len(self.coeffs):
            return Fraction(0)
        return Fraction(self.coeffs[i], self.den)

    def coefficients(self, lo: int, hi: int) -> list[Fraction]:
        return [self.coeff(n) for n in range(lo, hi)]

    def is_integral(self) -> bool:
        """True when every stored coefficient has denominator 1 (checked, not assumed)."""
        return self.den == 1

    def __repr__(self):
        head = ", ".join(
            f"q^{self.val + i}:{Fraction(c, self.den)}" for i, c in enumerate(self.coeffs[:6])
        )
        more = "..." if len(self.coeffs) > 6 else ""
        return f"QSeries({head}{more} | prec={self.prec})"

    # ----- comparison -----

    def agreement_window(self, other: "QSeries", upto: int | None = None) -> tuple[int, int]:
        lo = min(self.val, other.val)
        hi = min(self.prec, other.prec)
        if upto is not None:
            hi = min(hi, upto)
        return lo, hi

    def matches(self, other: "QSeries", upto: int | None = None) -> bool:
        """Exact coefficient equality on the overlap window; error if empty."""
        lo, hi = self.agreement_window(other, upto)
        if hi <= lo:
            if self.is_zero() and other.is_zero():
                return True
            raise PrecisionError("no overlapping precision window to compare")
        return all(self.coeff(n) == other.coeff(n) for n in range(lo, hi))

    # ----- arithmetic -----

    def __neg__(self):
        return QSeries(self.val, [-c for c in self.coeffs], self.prec, self.den)

    def __add__(self, other):
        if not isinstance(other, QSeries):
            return NotImplemented
        prec = min(self.prec, other.prec)
        val = min(self.val, other.val)
        den = self.den * other.den // math.gcd(self.den, other.den)
        n = max(0, prec - val)
        out = [0] * n
        fa = den // self.den
        for i, c in enumerate(self.coeffs):
            j = self.val + i - val
            if 0 <= j < n:
                out[j] += c * fa
        fb = den // other.den
        for i, c in enumerate(other.coeffs):
            j = other.val + i - val
            if 0 <= j < n:
                out[j] += c * fb
        return QSeries(val, out, prec, den)

    def __sub__(self, other):
        return self + (-other)

    def __mul__(self, other):
        if not isinstance(other, QSeries):
            return NotImplemented
        if self.is_zero() or other.is_zero():
            # 0 + O(q^pa) times b: zero up to pa + val_b
            prec = min(self.prec + (other.val), other.prec + (self.val))
            return QSeries.zero(prec)
        prec = min(self.prec + other.val, other.prec + self.val)
        val = self.val + other.val
        out = intpoly.convolve(list(self.coeffs), list(other.coeffs), prec - val)
        return QSeries(val, out, prec, self.den * other.den)

    def scale(self, s) -> "QSeries":
        s = Fraction(s)
        if s == 0:
            return QSeries.zero(self.prec)
        return QSeries(
            self.val,
            [c * s.numerator for c in self.coeffs],
            self.prec,
            self.den * s.denominator,
        )

    def shift(self, k: int) -> "QSeries":
        """Multiply by q^k."""
        return QSeries(self.val + k, self.coeffs, self.prec + k, self.den)

    def truncate(self, prec: int) -> "QSeries":
        if prec > self.prec:
            raise PrecisionError("cannot extend precision by truncation")
        return QSeries(self.val, self.coeffs, prec, self.den)

    def inverse(self, terms: int | None = None) -> "QSeries":
        """Multiplicative inverse; `terms` caps the unit-part precision."""
        if self.is_zero():
            raise NotInvertibleError("not invertible")
        avail = self.prec - self.val
        n = avail if terms is None else min(terms, avail)
        a = list(self.coeffs)[:n]
        da = self.den
        a0 = a[0]
        b, db = [da], abs(a0)
        if a0 < 0:
            b = [-da]
        k = 1
        while k < n:
            k = min(2 * k, n)
            c = intpoly.convolve(a[:k], b, k)
            e = [-x for x in c]
            e[0] += 2 * da * db
            b = intpoly.convolve(b, e, k)
            db = da * db * db
            g = intpoly.content_gcd(b, db)
            if g > 1:
                b = [x // g for x in b]
                db //= g
            b += [0] * (k - len(b))
        return QSeries(-self.val, b, -self.val + n, db)

    def pow(self, e: int) -> "QSeries":
        if e == 0:
            return QSeries.one(self.prec - self.val if self.coeffs else self.prec)
        if e < 0:
            return self.inverse().pow(-e)
        result = None
        base = self
        k = e
        while k:
            if k & 1:
                result = base if result is None else result * base
            k >>= 1
            if k:
                base = base * base
        return result

    def __pow__(self, e: int):
        return self.pow(e)

    def substitute_q_power(self, k: int) -> "QSeries":
        """f(q) -> f(q^k)."""
        if k < 1:
            raise ValueError("substitution power must be >= 1")
        if k == 1:
            return self
        out = [0] * (max(0, len(self.coeffs) - 1) * k + 1 if self.coeffs else 0)
        for i, c in enumerate(self.coeffs):
            out[i * k] = c
        return QSeries(self.val * k, out, self.prec * k, self.den)

    def u3(self) -> "QSeries":
        """Atkin U_3: pick every third coefficient, q^{3m} -> q^m."""
        val = -(-self.val // 3)
        prec = -(-self.prec // 3)
        out = []
        for m in range(val, prec):
            e = 3 * m
            if self.val <= e < self.val + len(self.coeffs):
                out.append(self.coeffs[e - self.val])
            else:
                out.append(0)
        return QSeries(val, out, prec, self.den)


def series_arith(a: QSeries, b, op: str):
    """Named dispatch mirroring the library surface: add/sub/mul/scale/shift."""
    if op == "add":
        return a + b
    if op == "sub":
        return a - b
    if op == "mul":
        return a * b
    if op == "scale":
        return a.scale(b)
    if op == "shift":
        return a.shift(b)
    raise ValueError(f"unknown op {op!r}")


def evaluate_poly(coeffs, xs: QSeries) -> QSeries:
    """Evaluate a polynomial (degree-indexed ints/Fractions) at a series."""
    prec = xs.prec + max(0, len(coeffs) - 1) * max(0, xs.val)
    acc = QSeries.zero(prec)
    for c in reversed(list(coeffs)):
        acc = acc * xs
        if c:
            acc = acc + QSeries.monomial(0, prec, c)
    return acc


# ---------------------------------------------------------------------------
# infinite products and eta quotients
# ---------------------------------------------------------------------------


@lru_cache(maxsize=64)
def pochhammer_series(d: int, prec: int) -> QSeries:
    """(q^d; q^d)_infinity via the pentagonal number expansion."""
    out = [0] * prec
    out[0] = 1
    k = 1
    while True:
        hit = False
        for g in (k * (3 * k - 1) // 2, k * (3 * k + 1) // 2):
            e = d * g
            if e < prec:
                out[e] += -1 if k % 2 else 1
                hit = True
        if not hit:
            break
        k += 1
    return QSeries(0, out, prec)


@lru_cache(maxsize=32)
def _product_series_cached(exps: tuple, prec: int) -> QSeries:
    num = QSeries.one(prec)
    den = QSeries.one(prec)
    for d, r in exps:
        p = pochhammer_series(d, prec).pow(abs(r))
        if r > 0:
            num = num * p
        else:
            den = den * p
    if den.coeffs == (1,):
        return num
    return num * den.inverse()


def product_series(exponents: dict[int, int], prec: int, qshift: int = 0) -> QSeries:
    """Expand prod_d (q^d; q^d)_inf^{r_d} * q^qshift to the given precision."""
    key = tuple(sorted((d, r) for d, r in exponents.items() if r != 0))
    s = _product_series_cached(key, prec)
    return s.shift(qshift) if qshift else s


class EtaQuotient:
    """A symbolic eta product: level N, exponents r_d on divisors, optional
    argument scaling tau -> k*tau."""

    __slots__ = ("level", "exponents", "scale")

    def __init__(self, level: int, exponents: dict[int, int], scale: int = 1):
        if level < 1 or scale < 1:
            raise ValueError("level and scale must be positive")
        for d in exponents:
            if d < 1 or level % d:
                raise ValueError(f"divisor {d} does not divide level {level}")
        self.level = level
        self.exponents = {d: r for d, r in sorted(exponents.items()) if r != 0}
        self.scale = scale

    def scaled_divisors(self) -> dict[int, int]:
        return {self.scale * d: r for d, r in self.exponents.items()}

    def prefactor_exponent(self) -> Fraction:
        """The q-power prefactor (1/24) * sum of (scaled divisor * exponent)."""
        return Fraction(sum(d * r for d, r in self.scaled_divisors().items()), 24)

    def weight(self) -> Fraction:
        return Fraction(sum(self.exponents.values()), 2)

    def at_level(self, level: int) -> "EtaQuotient":
        """Re-express f(k*tau) as an unscaled quotient on divisors {k*d} of `level`."""
        divs = self.scaled_divisors()
        for d in divs:
            if level % d:
                raise ValueError(f"scaled divisor {d} does not divide level {level}")
        return EtaQuotient(level, divs)

    def inverse(self) -> "EtaQuotient":
        return EtaQuotient(self.level, {d: -r for d, r in self.exponents.items()}, self.scale)

    def series(self, prec: int) -> QSeries:
        shift = self.prefactor_exponent()
        if shift.denominator != 1:
            raise FractionalPowerError("fractional q-power")
        return product_series(self.scaled_divisors(), prec, int(shift))

    def __repr__(self):
        return f"EtaQuotient(level={self.level}, exponents={self.exponents}, scale={self.scale})"


def eta_quotient_series(eq: EtaQuotient, prec: int) -> QSeries:
    return eq.series(prec)


# ---------------------------------------------------------------------------
# the specific modular functions of the congruence family
# ---------------------------------------------------------------------------


def dk_series(k: int, prec: int) -> QSeries:
    """Generating function of k-elongated plane partition counts d_k(n):
    (q^2;q^2)_inf^k / (q;q)_inf^(3k+1)."""
    if k < 0:
        raise ValueError("k must be nonnegative")
    if prec < 1:
        raise ValueError("precision must be >= 1")
    return product_series({1: -(3 * k + 1), 2: k}, prec)


def x_quotient() -> EtaQuotient:
    """Hauptmodul x on the level-6 curve: q(q^2)(q^6)^5 / ((q)^5(q^3))."""
    return EtaQuotient(6, {1: -5, 2: 1, 3: -1, 6: 5})


def z_quotient() -> EtaQuotient:
    """Hauptmodul z = 1+9x on the level-6 curve: (q^2)^9(q^3)^3 / ((q)^9(q^6)^3)."""
    return EtaQuotient(6, {1: -9, 2: 9, 3: 3, 6: -3})


def a_quotient() -> EtaQuotient:
    """Level-18 sifting multiplier q*D_2(q)/D_2(q^9) used by the even-step operator."""
    return EtaQuotient(18, {1: -7, 2: 2, 9: 7, 18: -2})


def x_series(prec: int) -> QSeries:
    return x_quotient().series(prec)


def z_series(prec: int) -> QSeries:
    return z_quotient().series(prec)


def a_series(prec: int) -> QSeries:
    return a_quotient().series(prec)
