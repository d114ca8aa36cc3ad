"""Ideals and quadratic irrationals of a real quadratic order.

An ideal is stored as e*[a, (b+sqrt(d))/2]: content e times the primitive
module a*Z + ((b+sqrt(d))/2)*Z. Validity needs b == d (mod 2) and
4a | b^2 - d; the norm is a*e^2. b is kept in the window (-a, a], which
makes dataclass equality an ideal equality test.

A quadratic irrational (b+sqrt(d))/(2a) is the content-1 case with the
same divisibility; `to_ideal` maps it to the module it generates, and
`reduced_preimage` inverts that map on reduced ideals.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from math import gcd, isqrt, sqrt

from .intarith import fundamental_decomposition, is_discriminant, xgcd


@dataclass(frozen=True)
class QuadIdeal:
    d: int
    a: int
    b: int
    e: int = 1

    def __post_init__(self):
        if not is_discriminant(self.d):
            raise ValueError(f"{self.d} is not a real quadratic discriminant")
        if self.a < 1:
            raise ValueError("ideal: a must be a positive integer")
        if self.e < 1:
            raise ValueError("ideal: e must be a positive integer")
        if (self.b - self.d) % 2 != 0:
            raise ValueError(
                f"invalid ideal: 2e does not divide e*d - b "
                f"(a={self.a}, b={self.b}, e={self.e}, d={self.d})"
            )
        if (self.b * self.b - self.d) % (4 * self.a) != 0:
            raise ValueError(
                f"invalid ideal: 4ae does not divide b^2 - d*e^2 "
                f"(a={self.a}, b={self.b}, e={self.e}, d={self.d})"
            )
        b = self.b % (2 * self.a)
        if b > self.a:
            b -= 2 * self.a
        object.__setattr__(self, "b", b)

    @property
    def norm(self) -> int:
        return self.a * self.e * self.e

    def conjugate(self) -> "QuadIdeal":
        return QuadIdeal(self.d, self.a, -self.b, self.e)


@dataclass(frozen=True)
class IdealFlags:
    primitive: bool
    regular: bool
    prime_to_conductor: bool
    reduced: bool


@dataclass(frozen=True)
class QuadIrrational:
    """(b + sqrt(d)) / (2a) with 4a | b^2 - d and content 1."""

    d: int
    a: int
    b: int

    def __post_init__(self):
        if not is_discriminant(self.d):
            raise ValueError(f"{self.d} is not a real quadratic discriminant")
        if self.a < 1:
            raise ValueError("quadratic irrational: a must be positive")
        if (self.b * self.b - self.d) % (4 * self.a) != 0:
            raise ValueError(
                f"quadratic irrational: 4a does not divide b^2 - d "
                f"(a={self.a}, b={self.b}, d={self.d})"
            )
        c = (self.b * self.b - self.d) // (4 * self.a)
        if gcd(gcd(self.a, self.b), c) != 1:
            raise ValueError(
                f"quadratic irrational: content gcd(a, b, (b^2-d)/(4a)) != 1 "
                f"(a={self.a}, b={self.b}, d={self.d})"
            )

    def value(self) -> float:
        return (self.b + sqrt(self.d)) / (2 * self.a)

    def is_reduced(self) -> bool:
        # rho > 1 and -1 < conjugate < 0, decided on integers via isqrt
        s = isqrt(self.d)
        return s >= 2 * self.a - self.b and self.b <= s and self.b + 2 * self.a > s

    def to_ideal(self) -> QuadIdeal:
        return QuadIdeal(self.d, self.a, self.b)


def make_ideal(a: int, b: int, e: int, d: int) -> QuadIdeal:
    """Validated ideal e*[a, (b+sqrt(d))/2]; raises naming any failed condition."""
    return QuadIdeal(d, a, b, e)


def unit_ideal(d: int) -> QuadIdeal:
    return QuadIdeal(d, 1, d % 2)


def canonical_irrational(d: int) -> QuadIrrational:
    """(b + sqrt(d))/2 with b = d mod 2: the generator of O_d over Z."""
    return QuadIrrational(d, 1, d % 2)


def _reduced_window_b(ideal: QuadIdeal) -> int:
    # unique residue of b mod 2a inside (sqrt(d) - 2a, sqrt(d))
    s = isqrt(ideal.d)
    return ideal.b + 2 * ideal.a * ((s - ideal.b) // (2 * ideal.a))


def classify(ideal: QuadIdeal) -> IdealFlags:
    d, a, b, e = ideal.d, ideal.a, ideal.b, ideal.e
    primitive = e == 1
    c = (d - b * b) // (4 * a)
    regular = primitive and gcd(gcd(a, b), c) == 1
    f = fundamental_decomposition(d).conductor
    prime_to_conductor = gcd(ideal.norm, f) == 1
    if not regular:
        reduced = False
    elif 4 * a * a < d:
        reduced = True
    elif a * a >= d:
        reduced = False
    else:
        reduced = _reduced_window_b(ideal) >= 2 * a - isqrt(d)
    return IdealFlags(primitive, regular, prime_to_conductor, reduced)


def reduced_preimage(ideal: QuadIdeal) -> QuadIrrational | None:
    """The reduced quadratic irrational generating this ideal, if one exists."""
    if not classify(ideal).regular:
        return None
    bw = _reduced_window_b(ideal)
    if bw >= 2 * ideal.a - isqrt(ideal.d):
        return QuadIrrational(ideal.d, ideal.a, bw)
    return None


def _regular_primitive_part(ideal: QuadIdeal) -> bool:
    c = (ideal.d - ideal.b * ideal.b) // (4 * ideal.a)
    return gcd(gcd(ideal.a, ideal.b), c) == 1


def multiply_ideals(i1: QuadIdeal, i2: QuadIdeal) -> QuadIdeal:
    """Product ideal in normalized form; content of the result is extracted.

    Uses the classical composition of the primitive parts. That formula
    needs at least one invertible (regular) factor: without it norms are
    not multiplicative and no standard-form product formula applies, so
    two irregular factors raise (module_product still handles them).
    """
    if i1.d != i2.d:
        raise ValueError(f"multiply_ideals: discriminants differ ({i1.d} vs {i2.d})")
    if not (_regular_primitive_part(i1) or _regular_primitive_part(i2)):
        raise ValueError(
            "multiply_ideals: both factors have irregular primitive parts; "
            "use module_product"
        )
    d = i1.d
    a1, b1, a2, b2 = i1.a, i1.b, i2.a, i2.b
    s = (b1 + b2) // 2
    g12, u12, v12 = xgcd(a1, a2)
    g, w1, w = xgcd(g12, s)
    u, v = u12 * w1, v12 * w1
    # u*a1 + v*a2 + w*s == g == gcd(a1, a2, s)
    c = (b1 * b2 + d) // 2
    a3 = a1 * a2 // (g * g)
    x0 = u * a1 * b2 + v * a2 * b1 + w * c
    assert x0 % g == 0
    b3 = (x0 // g) % (2 * a3)
    return QuadIdeal(d, a3, b3, i1.e * i2.e * g)


def ideal_power(ideal: QuadIdeal, t: int) -> QuadIdeal:
    if t < 0:
        raise ValueError("ideal_power: exponent must be non-negative")
    out = unit_ideal(ideal.d)
    for _ in range(t):
        out = multiply_ideals(out, ideal)
    return out


def module_product(i1: QuadIdeal, i2: QuadIdeal) -> QuadIdeal:
    """Product computed as a Z-module: pairwise generator products, then
    a two-column Hermite form. Independent of multiply_ideals; also valid
    when both factors are irregular.
    """
    if i1.d != i2.d:
        raise ValueError(f"module_product: discriminants differ ({i1.d} vs {i2.d})")
    d = i1.d
    # generators of 2*I in coordinates (x, y) <-> x + y*sqrt(d)
    gens1 = ((2 * i1.e * i1.a, 0), (i1.e * i1.b, i1.e))
    gens2 = ((2 * i2.e * i2.a, 0), (i2.e * i2.b, i2.e))
    prods = [
        (x1 * x2 + y1 * y2 * d, x1 * y2 + y1 * x2)
        for x1, y1 in gens1
        for x2, y2 in gens2
    ]
    # Bezout fold: w spans the image of the y-column
    wx, wy = 0, 0
    for x, y in prods:
        g_, u_, v_ = xgcd(wy, y)
        wx, wy = u_ * wx + v_ * x, g_
    assert wy > 0
    kernel_gcd = 0
    for x, y in prods:
        kernel_gcd = gcd(kernel_gcd, x - (y // wy) * wx)
    assert kernel_gcd > 0
    # the module a_hnf*Z + (wx + wy*sqrt(d))*Z equals 4*(i1*i2)
    assert wy % 2 == 0 and kernel_gcd % (2 * wy) == 0 and wx % wy == 0
    return QuadIdeal(d, kernel_gcd // (2 * wy), wx // wy, wy // 2)


_IDEAL_RE = re.compile(
    r"^\s*(?:(\d+)\*)?\[(\d+),\((-?\d+)\+sqrt\((\d+)\)\)/2\]\s*$"
)


def parse_ideal_literal(text: str) -> QuadIdeal:
    """Parse "e*[a,(b+sqrt(d))/2]"; the "e*" prefix is optional."""
    m = _IDEAL_RE.match(text)
    if not m:
        raise ValueError(f"cannot parse ideal literal: {text!r}")
    e = int(m.group(1)) if m.group(1) else 1
    a, b, d = int(m.group(2)), int(m.group(3)), int(m.group(4))
    return make_ideal(a, b, e, d)


def format_ideal_literal(ideal: QuadIdeal) -> str:
    return f"{ideal.e}*[{ideal.a},({ideal.b}+sqrt({ideal.d}))/2]"
