"""The localized ring Q[x]_S with S = {(1+9x)^n}: exact arithmetic, the
3-adic exponent bookkeeping functions, the U-operator recurrence engine on
monomials and on whole elements, h-array extraction, and the congruence
checks that drive the stability theorems.

Divisibility facts are never rounded into existence: any inexact division by
a power of 3 or of (1+9x) raises, because exact divisibility is the claim
under verification.
"""

from __future__ import annotations

import math
import threading
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache

from . import intpoly
from .report import VerificationReport, timed
from .series import QSeries, evaluate_poly


class LocringError(ArithmeticError):
    pass


class VMembershipError(LocringError):
    """An element failed a stability-set membership test; .reason says where."""

    def __init__(self, reason: str):
        super().__init__(reason)
        self.reason = reason


# ---------------------------------------------------------------------------
# exponent bookkeeping functions
# ---------------------------------------------------------------------------


def theta(m: int) -> int:
    """Guaranteed 3-adic valuation attached to x^m in the stability sets."""
    if m < 1:
        raise ValueError("theta needs m >= 1")
    if m <= 3:
        return 0
    if m <= 6:
        return 2
    return (3 * m - 3) // 4 - 1


def pi0(m: int, r: int) -> int:
    if m < 1 or r < 1:
        raise ValueError("pi0 needs m, r >= 1")
    return max(0, (3 * r - m) // 4 - 1)


def pi1(m: int, r: int) -> int:
    """Piecewise 3-exponent for the odd-step operator; the m >= 4 branch is the
    raw floor and may be negative below the support bound r >= ceil(m/3)."""
    if m < 1 or r < 1:
        raise ValueError("pi1 needs m, r >= 1")
    if m <= 3:
        return 0 if r == 1 else (3 * r + 1) // 4
    return (3 * r - m + 1) // 4


def pi(i: int, m: int, r: int) -> int:
    return pi0(m, r) if i == 0 else pi1(m, r)


def phi(l: int) -> int:
    if l < 0:
        raise ValueError("phi needs l >= 0")
    return 1 if l == 0 else (3 * l + 12) // 4


def psi(alpha: int) -> int:
    """Denominator power (1+9x)^psi carried by the alpha-th generating function."""
    if alpha < 1:
        raise ValueError("psi needs alpha >= 1")
    return 3 ** (alpha + 1) // 8


def beta(alpha: int) -> int:
    """Guaranteed exponent: 3^beta divides the alpha-th sieved coefficients."""
    if alpha < 1:
        raise ValueError("beta needs alpha >= 1")
    return 2 * (alpha // 2) + 1


def lam(alpha: int) -> int:
    """Minimal positive solution of 8x = 1 (mod 3^alpha)."""
    if alpha < 1:
        raise ValueError("lam needs alpha >= 1")
    if alpha % 2:
        return (1 + 5 * 3**alpha) // 8
    return (1 + 7 * 3**alpha) // 8


def exponent(kind: str, *args: int) -> int:
    """Named dispatch over the exponent functions."""
    table = {
        "theta": theta,
        "pi0": pi0,
        "pi1": pi1,
        "phi": phi,
        "psi": psi,
        "beta": beta,
        "lambda": lam,
    }
    if kind not in table:
        raise ValueError(f"unknown exponent function {kind!r}")
    return table[kind](*args)


def _floor_div_ref(num: int, den: int) -> int:
    # floor via explicit Euclidean correction, no // on negatives
    q, r = abs(num) // den, abs(num) % den
    if num >= 0:
        return q
    return -q if r == 0 else -q - 1


def theta_ref(m: int) -> int:
    if m <= 3:
        return 0
    if m <= 6:
        return 2
    return _floor_div_ref(3 * m - 3, 4) - 1


def pi0_ref(m: int, r: int) -> int:
    v = _floor_div_ref(3 * r - m, 4) - 1
    return v if v > 0 else 0


def pi1_ref(m: int, r: int) -> int:
    if m <= 3 and r == 1:
        return 0
    if m <= 3:
        return _floor_div_ref(3 * r + 1, 4)
    return _floor_div_ref(3 * r - m + 1, 4)


def phi_ref(l: int) -> int:
    return 1 if l == 0 else _floor_div_ref(3 * l + 12, 4)


# ---------------------------------------------------------------------------
# localized elements
# ---------------------------------------------------------------------------


class LocalizedElement:
    """numerator/(1+9x)^denom_pow with exact rational coefficients stored as
    an integer vector over one scalar denominator."""

    __slots__ = ("num", "den", "denom_pow")

    def __init__(self, num, denom_pow: int, den: int = 1):
        if denom_pow < 0:
            raise ValueError("denominator power must be nonnegative")
        num = list(num)
        if any(isinstance(c, Fraction) for c in num):
            extra = 1
            for c in num:
                if isinstance(c, Fraction):
                    extra = extra * c.denominator // math.gcd(extra, c.denominator)
            num = [int(Fraction(c) * extra) for c in num]
            den *= extra
        if den < 0:
            den, num = -den, [-c for c in num]
        if den == 0:
            raise ZeroDivisionError("zero scalar denominator")
        intpoly.trim(num)
        if den > 1:
            g = intpoly.content_gcd(num, den)
            if g > 1:
                num = [c // g for c in num]
                den //= g
        self.num = tuple(num)
        self.den = den
        self.denom_pow = denom_pow

    # ----- constructors / inspection -----

    @classmethod
    def zero(cls) -> "LocalizedElement":
        return cls([], 0)

    @classmethod
    def monomial(cls, m: int, denom_pow: int = 0, coeff=1) -> "LocalizedElement":
        return cls([0] * m + [coeff], denom_pow)

    def is_zero(self) -> bool:
        return not self.num

    @property
    def degree(self) -> int:
        return len(self.num) - 1 if self.num else -1

    def coeff(self, m: int) -> Fraction:
        if m < 0 or m >= len(self.num):
            return Fraction(0)
        return Fraction(self.num[m], self.den)

    def is_integral(self) -> bool:
        return self.den == 1

    def __repr__(self):
        return f"LocalizedElement(deg={self.degree}, denom_pow={self.denom_pow}, den={self.den})"

    # ----- ring operations -----

    def __add__(self, other: "LocalizedElement"):
        dp = max(self.denom_pow, other.denom_pow)
        a = intpoly.convolve(list(self.num), intpoly.one_plus_9x_pow(dp - self.denom_pow)) if self.num else []
        b = intpoly.convolve(list(other.num), intpoly.one_plus_9x_pow(dp - other.denom_pow)) if other.num else []
        den = self.den * other.den // math.gcd(self.den, other.den)
        a = intpoly.scale(a, den // self.den)
        b = intpoly.scale(b, den // other.den)
        return LocalizedElement(intpoly.add(a, b), dp, den)

    def __neg__(self):
        return LocalizedElement([-c for c in self.num], self.denom_pow, self.den)

    def __sub__(self, other):
        return self + (-other)

    def __mul__(self, other: "LocalizedElement"):
        return LocalizedElement(
            intpoly.convolve(list(self.num), list(other.num)) if self.num and other.num else [],
            self.denom_pow + other.denom_pow,
            self.den * other.den,
        )

    def mul_poly(self, poly) -> "LocalizedElement":
        if not self.num or not poly:
            return LocalizedElement([], self.denom_pow, 1)
        return LocalizedElement(intpoly.convolve(list(self.num), list(poly)), self.denom_pow, self.den)

    def scale(self, s) -> "LocalizedElement":
        s = Fraction(s)
        return LocalizedElement(
            [c * s.numerator for c in self.num], self.denom_pow, self.den * s.denominator
        )

    def shift_denom_pow(self, k: int) -> "LocalizedElement":
        """Divide by (1+9x)^k formally (no cancellation attempted)."""
        return LocalizedElement(self.num, self.denom_pow + k, self.den)

    def equals(self, other: "LocalizedElement") -> bool:
        """Cross-multiplied equality, independent of normalization."""
        a = intpoly.convolve(intpoly.scale(list(self.num), other.den),
                             intpoly.one_plus_9x_pow(other.denom_pow)) if self.num else []
        b = intpoly.convolve(intpoly.scale(list(other.num), self.den),
                             intpoly.one_plus_9x_pow(self.denom_pow)) if other.num else []
        return intpoly.trim(a) == intpoly.trim(b)

    def reduced(self) -> "LocalizedElement":
        """Cancel (1+9x) from the denominator while the division is exact."""
        num, dp = list(self.num), self.denom_pow
        while dp > 0 and num:
            try:
                num = intpoly.exact_div_one_plus_9x(num)
            except ArithmeticError:
                break
            dp -= 1
        return LocalizedElement(num, dp, self.den)

    def with_denom_pow(self, target: int) -> "LocalizedElement":
        """Re-express over (1+9x)^target exactly; LocringError if impossible."""
        if target < 0:
            raise ValueError("target power must be nonnegative")
        if target >= self.denom_pow:
            num = intpoly.convolve(list(self.num), intpoly.one_plus_9x_pow(target - self.denom_pow)) if self.num else []
            return LocalizedElement(num, target, self.den)
        num = list(self.num)
        for _ in range(self.denom_pow - target):
            try:
                num = intpoly.exact_div_one_plus_9x(num)
            except ArithmeticError as e:
                raise LocringError(
                    f"denominator power {self.denom_pow} cannot be lowered to {target}"
                ) from e
        return LocalizedElement(num, target, self.den)

    def to_series(self, xs: QSeries) -> QSeries:
        """Re-expand through a q-series for the variable x."""
        num = evaluate_poly([Fraction(c, self.den) for c in self.num], xs)
        if self.denom_pow == 0:
            return num
        unit = QSeries.one(xs.prec) + xs.scale(9)
        return num * unit.inverse().pow(self.denom_pow)


def loc_arith(a: LocalizedElement, b, op: str):
    if op == "add":
        return a + b
    if op == "sub":
        return a - b
    if op == "mul":
        return a * b
    if op == "scale":
        return a.scale(b)
    raise ValueError(f"unknown op {op!r}")


# ---------------------------------------------------------------------------
# modular-equation coefficients and fundamental operator relations
# ---------------------------------------------------------------------------

# coefficient polynomials (in x) of the degree-3 equation tying x(tau) to x(3tau)
MODX_A = (
    (0, -1, -18, -81),
    (0, -15, -279, -1296),
    (0, -57, -1080, -5184),
)

# coefficient polynomials (in z) of the degree-3 equation tying z(tau) to z(3tau)
MODZ_B = (
    (0, 0, 0, -1),
    (1, 9, 9, -16),
    (-2, -9, 72, -64),
    (1,),
)


def _z_poly_to_x(coeffs) -> tuple[int, ...]:
    out: list[int] = []
    zp = [1]
    for c in coeffs:
        out = intpoly.add(out, intpoly.scale(zp, c))
        zp = intpoly.mul(zp, [1, 9])
    return tuple(out)


MODZ_B_X = tuple(_z_poly_to_x(b) for b in MODZ_B)

# the six fundamental relations: (parity i, power m) -> U^{(i)}(x^m)
FUNDAMENTAL_RELATIONS = {
    (1, 0): ((1,), 0),
    (1, 1): ((0, 19, 360, 1728), 0),
    (1, 2): ((0, 10, 1269, 41904, 585792, 3732480, 8957952), 0),
    (0, 0): ((0, 33, 1392, 21120, 138240, 331776), 1),
    (0, 1): ((0, 12, 2325, 121080, 2915136, 37988352, 277696512, 1074954240, 1719926784), 1),
    (0, 2): ((0, 1, 1213, 176005, 10225152, 318757248, 6012278784, 72239910912,
              558546223104, 2698565124096, 7430083706880, 8916100448256), 1),
}


def kappa_pow(i: int) -> int:
    """Extra (1+9x) power picked up per application: 1 for the even step, 0 odd."""
    return 1 if i == 0 else 0


def support_delta(i: int) -> int:
    """Support lower bound offset: r >= ceil((m+delta)/3)."""
    return 1 if i == 0 else 0


_cache: dict[tuple[int, int, int], LocalizedElement] = {}
_cache_lock = threading.Lock()


def clear_cache():
    with _cache_lock:
        _cache.clear()


def _u_zpow_nonneg(i: int, p: int) -> LocalizedElement:
    """U^{(i)}((1+9x)^p) for p >= 0 via the binomial expansion into x powers."""
    acc = LocalizedElement.zero()
    for k in range(p + 1):
        acc = acc + apply_u_monomial(i, k, 0).scale(math.comb(p, k) * 9**k)
    return acc


def _initial_relation(i: int, m: int, n: int) -> LocalizedElement:
    """U^{(i)}(x^m/(1+9x)^n) for 1 <= m,n <= 3, derived from the fundamental
    relations through the binomial identity x^m = (z-1)^m/9^m and the z-side
    recursion; the division by 9^m must be exact or the algebra is wrong."""
    acc = LocalizedElement.zero()
    for r in range(m + 1):
        sgn = (-1) ** (m - r) * math.comb(m, r)
        p = r - n
        sub = _u_zpow_nonneg(i, p) if p >= 0 else apply_u_monomial(i, 0, -p)
        acc = acc + sub.scale(sgn)
    try:
        return LocalizedElement(intpoly.exact_div_scalar(list(acc.num), 9**m), acc.denom_pow, acc.den)
    except ArithmeticError as e:
        raise LocringError(f"inexact division by 9^{m} deriving relation (i={i},m={m},n={n})") from e


def apply_u_monomial(i: int, m: int, n: int) -> LocalizedElement:
    """U^{(i)}(x^m/(1+9x)^n) as an exact localized element (memoized)."""
    if i not in (0, 1) or m < 0 or n < 0:
        raise ValueError("need i in {0,1}, m >= 0, n >= 0")
    key = (i, m, n)
    hit = _cache.get(key)
    if hit is not None:
        return hit
    if n == 0:
        if m <= 2:
            num, dp = FUNDAMENTAL_RELATIONS[(i, m)]
            val = LocalizedElement(num, dp)
        else:
            # descend through the x-side equation: m -> m+j-3
            acc = LocalizedElement.zero()
            for j in range(3):
                acc = acc - apply_u_monomial(i, m + j - 3, 0).mul_poly(MODX_A[j])
            val = acc
    elif m == 0:
        # z-side descent: U(z^{-n}) = (1/(1+9x)^3) sum_k b_k U(z^{k-n})
        acc = LocalizedElement.zero()
        for k in range(1, 4):
            p = k - n
            sub = _u_zpow_nonneg(i, p) if p >= 0 else apply_u_monomial(i, 0, -p)
            acc = acc + sub.mul_poly(MODZ_B_X[k])
        val = acc.shift_denom_pow(3)
    elif m <= 3 and n <= 3:
        val = _initial_relation(i, m, n)
    elif m <= 3:
        # n >= 4: keep m, descend the denominator only
        acc = LocalizedElement.zero()
        for k in range(1, 4):
            acc = acc + apply_u_monomial(i, m, n - k).mul_poly(MODZ_B_X[k])
        val = acc.shift_denom_pow(3)
    else:
        # m >= 4, n >= 1: the full two-index recurrence
        acc = LocalizedElement.zero()
        for j in range(3):
            for k in range(1, 4):
                mp, np_ = m + j - 3, n - k
                if np_ >= 0:
                    sub = apply_u_monomial(i, mp, np_)
                else:
                    e = -np_
                    sub = LocalizedElement.zero()
                    for s in range(e + 1):
                        sub = sub + apply_u_monomial(i, mp + s, 0).scale(math.comb(e, s) * 9**s)
                ajbk = intpoly.mul(list(MODX_A[j]), list(MODZ_B_X[k]))
                acc = acc - sub.mul_poly(ajbk)
        val = acc.shift_denom_pow(3)
    with _cache_lock:
        _cache.setdefault(key, val)
    return _cache[key]


def base_relations(i: int) -> dict[tuple[int, int], LocalizedElement]:
    """The fundamental relations (m,0), the m=0 column, and the full 3x3
    initial table for one parity."""
    out = {}
    for m in range(3):
        out[(m, 0)] = apply_u_monomial(i, m, 0)
    for n in range(1, 4):
        out[(0, n)] = apply_u_monomial(i, 0, n)
    for m in range(1, 4):
        for n in range(1, 4):
            out[(m, n)] = apply_u_monomial(i, m, n)
    return out


def apply_u_element(i: int, f: LocalizedElement) -> LocalizedElement:
    """U^{(i)} applied to a whole localized element.

    Streams through the basis of powers of z = 1+9x so large numerators never
    instantiate a per-monomial table: ascending powers use the degree-3
    z-equation, descending powers the denominator recursion."""
    if f.is_zero():
        return LocalizedElement.zero()
    n = f.denom_pow
    deg = f.degree
    # numerator in the z basis: num(x) = (1/9^deg) sum_p zq[p] (z-1)^p ... z^p
    zq: list[int] = []
    for j in range(deg, -1, -1):
        zq = intpoly.mul(zq, [-1, 1]) if zq else []
        zq = intpoly.add(zq, [f.num[j] * 9 ** (deg - j)])
    zq = zq + [0] * (deg + 1 - len(zq))
    kap = kappa_pow(i)

    def zbase(p: int) -> LocalizedElement:
        return _u_zpow_nonneg(i, p)

    acc = LocalizedElement.zero()
    # descending powers z^{p-n} for p < n
    if n >= 1:
        window = [zbase(0), zbase(1), zbase(2)]  # U(z^{t+0}), U(z^{t+1}), U(z^{t+2}) at t = 0
        for t in range(1, n + 1):
            el = LocalizedElement.zero()
            for k in range(1, 4):
                el = el + window[k - 1].mul_poly(MODZ_B_X[k])
            el = el.shift_denom_pow(3)  # now U(z^{-t})
            p = n - t
            if 0 <= p <= deg and zq[p]:
                acc = acc + el.scale(zq[p])
            window = [el, window[0], window[1]]
    # ascending powers z^{p-n} for p >= n
    if deg >= n:
        window = [zbase(0), zbase(1), zbase(2)]
        for j in range(0, deg - n + 1):
            if j <= 2:
                el = window[j]
            else:
                el = LocalizedElement.zero()
                for k in range(3):
                    el = el - window[k].mul_poly(MODZ_B_X[k])
                window = [window[1], window[2], el]
            p = j + n
            if zq[p]:
                acc = acc + el.scale(zq[p])
    result = acc.scale(Fraction(1, 9**deg * f.den))
    return result.with_denom_pow(3 * n + kap) if not result.is_zero() else result


# ---------------------------------------------------------------------------
# w-expansion tables of the induction lemmas
# ---------------------------------------------------------------------------


def w_expansions() -> tuple[dict[tuple[int, int, int], int], dict[tuple[int, int], int]]:
    """Integer tables v(j,k,l) and v-hat(k,l) from

        w(j,k)    = -a_j b_k (1+9x)^{3(k-1)} = sum_{l>=1} v(j,k,l) 3^{floor((3l+j)/4)} x^l
        w-hat(k)  =      b_k (1+9x)^{3(k-1)} = [k=3] + sum_l v-hat(k,l) 3^{phi(l)} x^l

    Any non-integral entry after dividing the prescribed 3-power raises,
    falsifying the expansion claim.
    """
    v: dict[tuple[int, int, int], int] = {}
    for j in range(3):
        for k in range(1, 4):
            w = intpoly.scale(intpoly.mul(intpoly.mul(list(MODX_A[j]), list(MODZ_B_X[k])),
                                          intpoly.one_plus_9x_pow(3 * (k - 1))), -1)
            if w and w[0] != 0:
                raise LocringError(f"w({j},{k}) has a constant term")
            for l, c in enumerate(w):
                if l == 0 or c == 0:
                    continue
                if l > 12:
                    raise LocringError(f"w({j},{k}) exceeds degree 12")
                p = 3 ** ((3 * l + j) // 4)
                if c % p:
                    raise LocringError(f"v({j},{k},{l}) = {c}/3^... is not integral")
                v[(j, k, l)] = c // p
    vhat: dict[tuple[int, int], int] = {}
    for k in range(1, 4):
        w = intpoly.mul(list(MODZ_B_X[k]), intpoly.one_plus_9x_pow(3 * (k - 1)))
        for l, c in enumerate(w):
            if c == 0:
                continue
            if l == 0 and k == 3:
                if c != 1:
                    raise LocringError("w-hat(3) constant term is not 1")
                continue
            if l > 6:
                raise LocringError(f"w-hat({k}) exceeds degree 6")
            p = 3 ** phi(l)
            if c % p:
                raise LocringError(f"v-hat({k},{l}) = {c}/3^{phi(l)} is not integral")
            vhat[(k, l)] = c // p
    return v, vhat


# ---------------------------------------------------------------------------
# h-arrays
# ---------------------------------------------------------------------------


@dataclass
class HArray:
    i: int
    entries: dict[tuple[int, int, int], int]

    def __getitem__(self, key: tuple[int, int, int]) -> int:
        return self.entries.get(key, 0)


@lru_cache(maxsize=4096)
def _h_slice(i: int, m: int, n: int) -> dict[int, int]:
    if m < 1 or n < 1:
        raise ValueError("h-array indices need m, n >= 1")
    el = apply_u_monomial(i, m, n).with_denom_pow(3 * n + kappa_pow(i))
    if not el.is_integral():
        raise LocringError(f"U^({i})(x^{m}/(1+9x)^{n}) has non-integer numerator")
    lo = -(-(m + support_delta(i)) // 3)
    out: dict[int, int] = {}
    for r, c in enumerate(el.num):
        if c == 0:
            continue
        if r < lo:
            raise LocringError(f"support below ceil((m+delta)/3) at (i={i},m={m},n={n},r={r})")
        p = 3 ** pi(i, m, r)
        if c % p:
            raise LocringError(
                f"3^{pi(i, m, r)} does not divide coefficient x^{r} of U^({i})(x^{m}/(1+9x)^{n})"
            )
        out[r] = c // p
    return out


def extract_h(i: int, m: int, n: int, r_max: int | None = None) -> dict[int, int]:
    """h_i(m,n,r) for one (m,n): the x^r coefficients of the canonical
    representation divided by 3^{pi_i(m,r)}, checked exactly integral."""
    s = _h_slice(i, m, n)
    if r_max is not None:
        return {r: h for r, h in s.items() if r <= r_max}
    return dict(s)


def h_value(i: int, m: int, n: int, r: int) -> int:
    return _h_slice(i, m, n).get(r, 0)


def build_h_array(i: int, m_max: int, n_max: int) -> HArray:
    entries = {}
    for m in range(1, m_max + 1):
        for n in range(1, n_max + 1):
            for r, h in _h_slice(i, m, n).items():
                entries[(m, n, r)] = h
    return HArray(i, entries)


# ---------------------------------------------------------------------------
# structured checks
# ---------------------------------------------------------------------------

# Reference gain tables for theta(m) + pi_i(m,r) - theta(r) - 2i on the 6x6
# window; None marks cells below the support bound.
TABLE_I0 = {
    1: (0, 0, 1, -1, 0, 1),
    2: (0, 0, 0, -1, 0, 1),
    3: (None, 0, 0, -1, 0, 0),
    4: (None, 2, 2, 1, 1, 2),
    5: (None, 2, 2, 0, 1, 2),
    6: (None, None, 2, 0, 1, 2),
}
TABLE_I1 = {
    1: (-2, -1, 0, -1, 0, 0),
    2: (-2, -1, 0, -1, 0, 0),
    3: (-2, -1, 0, -1, 0, 0),
    4: (None, 0, 1, 0, 1, 1),
    5: (None, 0, 1, 0, 0, 1),
    6: (None, 0, 1, -1, 0, 1),
}

# cells where the 6x6 window dips negative; compensated by h-congruences
EXCEPTION_CELLS = {
    0: {(m, 4) for m in (1, 2, 3)},
    1: {(m, r) for m in (1, 2, 3) for r in (1, 2, 4)} | {(6, 4)},
}


def _gain(i: int, m: int, r: int) -> int:
    return theta(m) + pi(i, m, r) - theta(r) - 2 * i


def check_exponent_lemmas(m_max: int = 60, r_max: int = 60, l_max: int = 12) -> VerificationReport:
    """Exhaustive finite verification of the exponent inequalities: the
    phi-gain lemma (=1 at l=0, >=2 for l>0), the frozen 6x6 gain tables,
    and nonnegativity of the gain outside the tabulated exception cells."""
    if min(m_max, r_max, l_max) < 12:
        raise ValueError("bounds must be at least 12")
    rep = VerificationReport("exponent-lemmas",
                             params={"m_max": m_max, "r_max": r_max, "l_max": l_max})
    with timed(rep):
        for i in (0, 1):
            for m in range(1, m_max + 1):
                for r in range(1, r_max + 1):
                    base = pi(i, m, r)
                    for l in range(0, min(l_max, r - 1) + 1):
                        v = pi(i, m, r - l) + phi(l) - base
                        rep.tick()
                        if l == 0 and v != 1:
                            rep.fail({"check": "phi-gain", "i": i, "m": m, "r": r, "l": l, "value": v})
                        elif l > 0 and v < 2:
                            rep.fail({"check": "phi-gain", "i": i, "m": m, "r": r, "l": l, "value": v})
        for i, table in ((0, TABLE_I0), (1, TABLE_I1)):
            lo_of = lambda m: -(-(m + support_delta(i)) // 3)
            for m, row in table.items():
                for r, want in enumerate(row, start=1):
                    rep.tick()
                    if want is None:
                        if r >= lo_of(m):
                            rep.fail({"check": "table-blank", "i": i, "m": m, "r": r})
                        continue
                    got = _gain(i, m, r)
                    if got != want:
                        rep.fail({"check": "table", "i": i, "m": m, "r": r,
                                  "expected": want, "got": got})
        for i in (0, 1):
            lo_of = lambda m: -(-(m + support_delta(i)) // 3)
            for m in range(1, m_max + 1):
                for r in range(lo_of(m), r_max + 1):
                    if r < 1:
                        continue
                    rep.tick()
                    v = _gain(i, m, r)
                    if (m, r) in EXCEPTION_CELLS[i]:
                        if v >= 0:
                            rep.fail({"check": "exception-cell-not-negative",
                                      "i": i, "m": m, "r": r, "value": v})
                    elif v < 0:
                        rep.fail({"check": "gain-negative", "i": i, "m": m, "r": r, "value": v})
    return rep


def check_h_congruences(n_max: int = 10, r_max: int = 8, m_max: int = 9) -> VerificationReport:
    """The h-array congruences: period-3 reduction mod 3, the specific mod-3
    vanishing entries, the mixed three-term recurrence mod 9, the period-3
    reduction mod 9, and the fixed residue of h_1(m, 3n+1, 1) mod 9.

    The computed residue of h_1(m,1,1) mod 9 is recorded in the report; it is
    1 (the value the stability argument consumes), and the check asserts both
    the constancy across n = 1 mod 3 and that value.
    """
    if n_max < 7:
        raise ValueError("n_max must be at least 7")
    rep = VerificationReport("h-congruences",
                             params={"n_max": n_max, "r_max": r_max, "m_max": m_max})

    def rows(i, m, n):
        return _h_slice(i, m, n)

    with timed(rep):
        for i in (0, 1):
            for m in range(1, m_max + 1):
                for n in range(4, n_max + 1):
                    a, b = rows(i, m, n), rows(i, m, n - 3)
                    for r in set(a) | set(b):
                        rep.tick()
                        if (a.get(r, 0) - b.get(r, 0)) % 3:
                            rep.fail({"check": "period3-mod3", "i": i, "m": m, "n": n, "r": r})
        for m in (1, 2, 3):
            rep.tick()
            if h_value(1, m, 1, 2) % 3:
                rep.fail({"check": "h1(m,1,2) mod 3", "m": m, "value": h_value(1, m, 1, 2)})
            rep.tick()
            if h_value(0, m, 3, 4) % 3:
                rep.fail({"check": "h0(m,3,4) mod 3", "m": m, "value": h_value(0, m, 3, 4)})
        for m in range(1, 7):
            rep.tick()
            if h_value(1, m, 1, 4) % 3:
                rep.fail({"check": "h1(m,1,4) mod 3", "m": m, "value": h_value(1, m, 1, 4)})
        for i in (0, 1):
            for m in range(1, m_max + 1):
                for n in range(4, n_max + 1):
                    hn = rows(i, m, n)
                    h1_, h2_, h3_ = rows(i, m, n - 1), rows(i, m, n - 2), rows(i, m, n - 3)
                    for r in set(hn) | set(h1_) | set(h2_) | set(h3_):
                        rep.tick()
                        mixed = 3 * (h1_.get(r, 0) - h2_.get(r, 0)) + h3_.get(r, 0)
                        if (hn.get(r, 0) - mixed) % 9:
                            rep.fail({"check": "mixed-recurrence-mod9",
                                      "i": i, "m": m, "n": n, "r": r})
        # period-3 reductions mod 9
        for n in range(4, n_max + 1, 3):
            for r in range(1, min(r_max, 5) + 1):
                for m in range(1, 3 * r + 1):
                    rep.tick()
                    if (h_value(1, m, n, r) - h_value(1, m, 1, r)) % 9:
                        rep.fail({"check": "h1 period mod9", "m": m, "n": n, "r": r})
        for n in range(6, n_max + 1, 3):
            for r in range(1, r_max + 1):
                for m in range(1, min(3 * r, 15) + 1):
                    rep.tick()
                    if (h_value(0, m, n, r) - h_value(0, m, 3, r)) % 9:
                        rep.fail({"check": "h0 period mod9", "m": m, "n": n, "r": r})
        # fixed residue at r = 1
        residues = {m: h_value(1, m, 1, 1) % 9 for m in (1, 2, 3)}
        rep.params["h1_m_1_1_mod9"] = residues
        for m in (1, 2, 3):
            for n in range(4, n_max + 1, 3):
                rep.tick()
                got = h_value(1, m, n, 1) % 9
                if got != residues[m] or got != 1:
                    rep.fail({"check": "h1(m,3n+1,1) residue", "m": m, "n": n,
                              "residue": got, "expected": 1})
    return rep


# ---------------------------------------------------------------------------
# stability-set membership
# ---------------------------------------------------------------------------


@dataclass
class VDecomposition:
    """Witness that f = (1/(1+9x)^n) sum_m s(m) 3^theta(m) x^m, with the mod-9
    sum condition when i = 1."""

    i: int
    n: int
    s: dict[int, int]

    def element(self) -> LocalizedElement:
        num = [0] * (max(self.s, default=0) + 1)
        for m, sm in self.s.items():
            num[m] = sm * 3 ** theta(m)
        return LocalizedElement(num, self.n)


def v_membership(f: LocalizedElement, i: int, n: int) -> VDecomposition:
    """Decompose f as a stability-set element or raise VMembershipError
    naming the first violated condition."""
    try:
        el = f.with_denom_pow(n)
    except LocringError as e:
        raise VMembershipError(f"denominator power cannot be normalized to {n}: {e}") from e
    if not el.is_integral():
        raise VMembershipError(f"non-integer coefficients (denominator {el.den})")
    if el.coeff(0):
        raise VMembershipError(f"nonzero constant term {el.coeff(0)}")
    s: dict[int, int] = {}
    for m, c in enumerate(el.num):
        if m == 0 or c == 0:
            continue
        p = 3 ** theta(m)
        if c % p:
            raise VMembershipError(f"coefficient of x^{m} not divisible by 3^{theta(m)}")
        s[m] = c // p
    if i == 1:
        tail = s.get(1, 0) + s.get(2, 0) + s.get(3, 0)
        if tail % 9:
            raise VMembershipError(f"s(1)+s(2)+s(3) = {tail} is not 0 mod 9")
    return VDecomposition(i, n, s)


def random_v_element(rng, i: int, n: int, max_support: int = 12,
                     coeff_bound: int = 50) -> LocalizedElement:
    """Seeded random stability-set element: support <= max_support,
    |s(m)| <= coeff_bound, with s(3) adjusted to meet the mod-9 sum when i=1."""
    s = {}
    for m in rng.sample(range(1, max_support + 1), rng.randint(1, max_support)):
        v = rng.randint(-coeff_bound, coeff_bound)
        if v:
            s[m] = v
    if i == 1:
        tail = s.get(1, 0) + s.get(2, 0) + s.get(3, 0)
        if tail % 9:
            s[3] = s.get(3, 0) - (tail % 9)
    return VDecomposition(i, n, s).element()


# ---------------------------------------------------------------------------
# the three linear forms of the double-step theorem
# ---------------------------------------------------------------------------

# Frozen reference coefficients for the three linear forms (index m = 1..15)
# and their grand total; check_that_vectors re-derives every entry from the
# h-arrays and separately verifies the mod-9 reduction structure that the
# total must satisfy.
THAT_EXPECTED_T1 = {1: Fraction(-2, 3), 2: Fraction(22, 3), 3: Fraction(49, 3),
                   4: 82, 5: 16, 6: 1}
THAT_EXPECTED_T2 = {1: Fraction(625, 3), 2: Fraction(36784, 3), 3: Fraction(1201024, 3),
                   4: 24003457, 5: 60815254, 6: 77522425, 7: 172725210, 8: 243795825,
                   9: 228765303, 10: 48752847, 11: 21348036, 12: 6305121,
                   13: 1201392, 14: 44469, 15: 2187}
THAT_EXPECTED_T3_HEAD = {1: Fraction(51181, 3), 2: Fraction(8480416, 3),
                        3: Fraction(315495472, 3)}
THAT_EXPECTED_T3_TAIL = {4: 6332504419, 5: 15950675878, 6: 20231534017,
                          7: 44928767016, 8: 63287781921, 9: 59316685155,
                          10: 12633117777, 11: 5530080276, 12: 1633087575,
                          13: 311160528, 14: 11517471, 15: 566433}
THAT_EXPECTED_TOTAL = {1: 17268, 2: 2839074, 3: 105565515, 4: 6356507958,
                      5: 16011491148, 6: 20309056443, 7: 45101492226,
                      8: 63531577746, 9: 59545450458, 10: 12681870624,
                      11: 5551428312, 12: 1639392696, 13: 312361920,
                      14: 11561940, 15: 568620}


def that_vectors() -> dict[int, dict[int, Fraction]]:
    """The linear forms t-hat(w), w = 1..3, as coefficient vectors over the
    symbolic s(1..15): t-hat(w)[m] = sum_r h_1(m,1,r) h_0(r,3,w)
    3^{theta(m)+pi_1(m,r)+pi_0(r,w)-2}, with r <= 2 for w=1 and r <= 5 else."""
    out: dict[int, dict[int, Fraction]] = {}
    for w in (1, 2, 3):
        r_hi = 2 if w == 1 else 5
        vec: dict[int, Fraction] = {}
        for r in range(1, r_hi + 1):
            h0rw = h_value(0, r, 3, w)
            if h0rw == 0:
                continue
            for m in range(1, 3 * r + 1):
                h1mr = h_value(1, m, 1, r)
                if h1mr == 0:
                    continue
                e = theta(m) + pi1(m, r) + pi0(r, w) - 2
                vec[m] = vec.get(m, Fraction(0)) + h1mr * h0rw * Fraction(3) ** e
        out[w] = {m: c for m, c in vec.items() if c != 0}
    return out


def check_that_vectors() -> VerificationReport:
    """Compare the computed linear forms against the frozen reference
    coefficients, and verify the cancellation structure: fractional heads
    integral exactly under the mod-3 sum condition, and the total reducing to
    6(s(1)+s(2)+s(3)) mod 9."""
    rep = VerificationReport("that-vectors")
    with timed(rep):
        vecs = that_vectors()
        expect = {
            1: THAT_EXPECTED_T1,
            2: THAT_EXPECTED_T2,
            3: {**THAT_EXPECTED_T3_HEAD, **THAT_EXPECTED_T3_TAIL},
        }
        for w in (1, 2, 3):
            for m in range(1, 16):
                want = Fraction(expect[w].get(m, 0))
                got = vecs[w].get(m, Fraction(0))
                rep.tick()
                if want != got:
                    rep.fail({"check": "coefficient", "w": w, "m": m,
                              "expected": want, "got": got})
        total = {m: sum(vecs[w].get(m, Fraction(0)) for w in (1, 2, 3)) for m in range(1, 16)}
        for m in range(1, 16):
            rep.tick()
            if total[m] != THAT_EXPECTED_TOTAL.get(m, 0):
                rep.fail({"check": "total", "m": m,
                          "expected": THAT_EXPECTED_TOTAL.get(m, 0), "got": total[m]})
        # fractional parts sit at m <= 3 with denominator 3 and congruent
        # numerators, so they cancel exactly when s(1)+s(2)+s(3) = 0 mod 3
        for w in (1, 2, 3):
            heads = [vecs[w].get(m, Fraction(0)) for m in (1, 2, 3)]
            rep.tick()
            if any(c.denominator not in (1, 3) for c in heads):
                rep.fail({"check": "head-denominator", "w": w,
                          "heads": [str(h) for h in heads]})
            nums = [int(c * 3) for c in heads]
            if not (nums[0] % 3 == nums[1] % 3 == nums[2] % 3):
                rep.fail({"check": "head-cancellation", "w": w, "numerators": nums})
            if any(c.denominator != 1 for m, c in vecs[w].items() if m >= 4):
                rep.fail({"check": "tail-integrality", "w": w})
        for m in range(1, 16):
            rep.tick()
            t = total[m]
            if t.denominator != 1:
                rep.fail({"check": "total-integrality", "m": m, "value": t})
            elif m <= 3 and int(t) % 9 != 6:
                rep.fail({"check": "total mod 9 head", "m": m, "value": int(t) % 9})
            elif m >= 4 and int(t) % 9 != 0:
                rep.fail({"check": "total mod 9 tail", "m": m, "value": int(t) % 9})
    return rep
