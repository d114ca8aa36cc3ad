"""Discriminant families: the sieved arithmetic progression n0 mod q whose
values n make every n^2 + 4p_i squarefree-friendly, plus the classical
parametric families (Chowla, Shanks, the n^2 +- 4p family, and the cubic
(p^k q + p + 1)^2 - 4p family) with their per-record bound checks.
"""

from __future__ import annotations

from dataclasses import dataclass, replace
from fractions import Fraction
from math import isqrt, log, prod, sqrt

import numpy as np
from mpmath import mp

from .cfrac import fundamental_unit, is_norm_of_reduced_principal
from .classno import h_bound_report, l_value_truncated, legendre_table
from .intarith import (
    crt,
    icbrt,
    is_prime,
    is_squarefree,
    kronecker,
    primes_up_to,
    sqrt_mod_prime,
)

MERTENS_M = 0.26149
HEADLINE_CONSTANT = 192.0


@dataclass(frozen=True)
class ProgressionSpec:
    m: int
    primes: tuple[int, ...]
    x: int
    eps1: float
    S: tuple[int, ...]
    P_small: tuple[int, ...]
    S_prime: tuple[int, ...]
    q: int
    n0: int


@dataclass(frozen=True)
class ScanRecord:
    k: int
    n: int
    d_values: tuple[int, ...]
    squarefree: tuple[bool, ...]
    h: int | None = None
    regulator: float | None = None
    L_truncated: float | None = None
    bound: float | None = None
    bound_ok: bool | None = None


@dataclass(frozen=True)
class StarWitness:
    modulus: int
    residue: int
    root: int


@dataclass(frozen=True)
class ConstantsReport:
    C_m: float
    C_prime_m: float
    mertens_M: float
    headline_constant: float


def count_good_residues(p: int, primes: list[int]) -> int:
    """#{y in F_p : (y|p) = 1, (y+4p_i|p) = -1 for all i}, by brute force."""
    if p in primes:
        raise ValueError(f"count_good_residues: {p} is one of the family primes")
    if p == 2 or not is_prime(p):
        raise ValueError("count_good_residues: p must be an odd prime")
    t = legendre_table(p)
    y = np.arange(p, dtype=np.int64)
    mask = t == 1
    for pi in primes:
        mask = mask & (t[(y + 4 * pi) % p] == -1)
    return int(np.count_nonzero(mask))


def good_residue_lower_bound(p: int, m: int) -> float:
    """Explicit character-sum lower bound for count_good_residues."""
    return (
        p / 2 ** (m + 1)
        - ((m - 1) / 2 + 2.0 ** -(m + 1)) * sqrt(p)
        - (m + 1) / 2
    )


def check_star(m: int, primes: list[int]) -> StarWitness | None:
    """Quadratic residue N mod prod{p_j <= 2m} with every N + 4p_i a unit
    mod those p_j; None when no residue works.
    """
    if len(set(primes)) != len(primes):
        raise ValueError("check_star: primes must be distinct")
    small = [pj for pj in primes if pj <= 2 * m]
    modulus = prod(small)
    if modulus == 1:
        return StarWitness(1, 0, 0)
    for r in range(modulus):
        n_val = r * r % modulus
        if all((n_val + 4 * pi) % pj != 0 for pj in small for pi in primes):
            return StarWitness(modulus, n_val, r)
    return None


def find_prime_tuple(m: int, bound: int) -> list[int] | None:
    """Smallest tuple p_1 < ... < p_m <= bound, all 1 mod 4, pairwise
    kronecker(-p_j, p_i) = -1, on which check_star succeeds; None if the
    bound is too small.
    """
    if m < 1:
        raise ValueError("find_prime_tuple: m must be positive")
    candidates = [p for p in primes_up_to(bound) if p % 4 == 1]
    chosen: list[int] = []

    def extend() -> bool:
        if len(chosen) == m:
            return check_star(m, chosen) is not None
        floor_p = chosen[-1] if chosen else 0
        for p in candidates:
            if p <= floor_p:
                continue
            if all(kronecker(-p, pi) == -1 for pi in chosen):
                chosen.append(p)
                if extend():
                    return True
                chosen.pop()
        return False

    return list(chosen) if extend() else None


def build_progression(
    m: int, primes: list[int], x: int, eps1: float
) -> ProgressionSpec:
    """Assemble the modulus q and residue n0 forcing chi_{d_i}(p) = -1 on
    S_prime and gcd(d_i, q) = 1 for every n = n0 mod q, d_i = n^2 + 4p_i.
    """
    if len(primes) != m:
        raise ValueError("build_progression: need exactly m primes")
    if not 0 < eps1 < 1:
        raise ValueError("build_progression: eps1 must lie in (0, 1)")
    if x < 10:
        raise ValueError("build_progression: x too small")
    witness = check_star(m, primes)
    if witness is None:
        raise ValueError(f"build_progression: condition (*) fails for {primes}")
    threshold = m * m * 4**m + 2
    s_prime_limit = int(log(x) ** eps1)
    prime_set = set(primes)
    s_set = tuple(p for p in primes_up_to(threshold) if p not in prime_set)
    p_small = tuple(p for p in primes if p <= 2 * m)
    s_prime = tuple(
        p for p in primes_up_to(s_prime_limit) if p > threshold and p not in prime_set
    )
    residues: list[int] = []
    moduli: list[int] = []
    for p in s_set:
        residues.append(1 if p == 2 else 0)
        moduli.append(p)
    for pj in p_small:
        residues.append(witness.root % pj)
        moduli.append(pj)
    for p in s_prime:
        r_p = next(
            (
                r
                for r in range(p)
                if all(kronecker(r * r + 4 * pi, p) == -1 for pi in primes)
            ),
            None,
        )
        if r_p is None:
            raise ValueError(f"build_progression: no admissible residue modulo {p}")
        residues.append(r_p)
        moduli.append(p)
    n0, q = crt(residues, moduli)
    return ProgressionSpec(m, tuple(primes), x, eps1, s_set, p_small, s_prime, q, n0)


def _attach_analysis(
    rec: ScanRecord, primes: tuple[int, ...], euler_bound_B: int | None
) -> ScanRecord:
    from .classno import class_number_forms

    if len(rec.d_values) != 1:
        return rec
    d = rec.d_values[0]
    h, _ = class_number_forms(d)
    reg = fundamental_unit(d).regulator
    l_val = l_value_truncated(d, euler_bound_B) if euler_bound_B else None
    bound = bound_ok = None
    if d >= 16:
        rep = h_bound_report(d, HEADLINE_CONSTANT * log(max(primes)))
        bound, bound_ok = rep.bound, rep.satisfied
    return replace(
        rec, h=h, regulator=reg, L_truncated=l_val, bound=bound, bound_ok=bound_ok
    )


def scan_squarefree(
    spec: ProgressionSpec,
    k_max: int,
    k_min: int = 1,
    strict_range: bool = False,
    with_h: bool = False,
    euler_bound_B: int | None = None,
) -> list[ScanRecord]:
    """Survivors k in [k_min, k_max] with every d_i = (n0+kq)^2 + 4p_i
    squarefree. Exact: a polynomial sieve removes all prime factors up to
    cbrt(max d), then a perfect-square test settles each cofactor.
    """
    k_lo = k_min
    if strict_range:
        # keep d_i > sqrt(x): k q > x^(1/4)
        k_lo = max(k_lo, int(spec.x**0.25 / spec.q) + 1)
    count = k_max - k_lo + 1
    if count <= 0:
        return []
    n0, q = spec.n0, spec.q
    rems = [
        [(n0 + k * q) ** 2 + 4 * pi for k in range(k_lo, k_max + 1)]
        for pi in spec.primes
    ]
    flags = [bytearray(count) for _ in spec.primes]
    sieve_primes = primes_up_to(icbrt(max(max(r) for r in rems)) + 1)
    for i, pi in enumerate(spec.primes):
        rem, flag = rems[i], flags[i]
        for p in sieve_primes:
            if q % p == 0:
                if (n0 * n0 + 4 * pi) % p != 0:
                    continue
                hits: range | list[int] = range(count)
            else:
                t = sqrt_mod_prime(-4 * pi % p, p)
                if t is None:
                    continue
                inv_q = pow(q, -1, p)
                hits = []
                for y in {t, (p - t) % p}:
                    k0 = (y - n0) * inv_q % p
                    hits.extend(range((k0 - k_lo) % p, count, p))
            for j in hits:
                v, e = rem[j], 0
                while v % p == 0:
                    v //= p
                    e += 1
                rem[j] = v
                if e >= 2:
                    flag[j] = 1
    for i in range(len(spec.primes)):
        rem, flag = rems[i], flags[i]
        for j in range(count):
            if not flag[j] and rem[j] > 1:
                r = isqrt(rem[j])
                if r * r == rem[j]:
                    flag[j] = 1
    out: list[ScanRecord] = []
    for j in range(count):
        if any(flags[i][j] for i in range(len(spec.primes))):
            continue
        k = k_lo + j
        n = n0 + k * q
        rec = ScanRecord(
            k,
            n,
            tuple(n * n + 4 * pi for pi in spec.primes),
            tuple(True for _ in spec.primes),
        )
        out.append(
            _attach_analysis(rec, spec.primes, euler_bound_B) if with_h else rec
        )
    return out


def squarefree_density(spec: ProgressionSpec, prime_bound: int) -> float:
    """Truncated product of (1 - rho(p^2)/p^2) over p <= prime_bound, where
    rho counts k mod p^2 with p^2 | (n0+kq)^2 + 4p_1.

    For p | q the count is brute-forced over the p^2 classes (those p are
    tiny); for p coprime to q the substitution u = n0 + kq is a bijection
    mod p^2, so rho is the number of square roots of -4p_1, which Hensel
    pins to 0 or 2 (and 0 when p = p_1 is odd).
    """
    if spec.m != 1:
        raise ValueError("squarefree_density: defined for m = 1 only")
    p1 = spec.primes[0]
    density = 1.0
    for p in primes_up_to(prime_bound):
        if spec.q % p == 0:
            rho = sum(
                ((spec.n0 + k * spec.q) ** 2 + 4 * p1) % (p * p) == 0
                for k in range(p * p)
            )
        elif p == p1:
            rho = 0
        else:
            rho = 1 + kronecker(-4 * p1, p)
        density *= 1.0 - rho / (p * p)
    return density


def compute_constants(m: int, primes: list[int]) -> ConstantsReport:
    if len(set(primes)) != len(primes):
        raise ValueError("compute_constants: primes must be distinct")
    threshold = m * m * 4**m + 2
    c_prime = Fraction(1)
    for pi in primes:
        if pi > threshold:
            c_prime *= Fraction(pi + 1, pi - 1)
    for p in primes_up_to(threshold):
        c_prime *= Fraction(p + 1, p - 1)
    return ConstantsReport(
        float(16 * c_prime), float(c_prime), MERTENS_M, HEADLINE_CONSTANT
    )


def scan_chowla(n_range) -> list[ScanRecord]:
    out = []
    for n in n_range:
        if n < 1:
            continue
        d = 4 * n * n + 1
        if not is_squarefree(d):
            continue
        reg = fundamental_unit(d).regulator
        bound = log(2 * sqrt(d))
        out.append(
            ScanRecord(
                n, n, (d,), (True,),
                regulator=reg, bound=bound, bound_ok=reg <= bound + 1e-9,
            )
        )
    return out


def scan_shanks(k_range) -> list[ScanRecord]:
    out = []
    for k in k_range:
        if k < 1:
            continue
        n = 2**k + 3
        d = n * n - 8
        if not is_squarefree(d):
            continue
        reg = fundamental_unit(d).regulator
        with mp.workdps(40):
            root = mp.sqrt(d)
            closed = float(
                k * mp.log((n + root) / 4) + mp.log((2**k + 1 + root) / 2)
            )
        out.append(
            ScanRecord(
                k, n, (d,), (True,),
                regulator=reg, bound=closed,
                bound_ok=abs(reg - closed) <= 1e-9 * abs(closed),
            )
        )
    return out


def scan_yamamoto(p: int, n_range, sign: int = 1) -> list[ScanRecord]:
    if not is_prime(p):
        raise ValueError(f"scan_yamamoto: p = {p} is not prime")
    if sign not in (1, -1):
        raise ValueError("scan_yamamoto: sign must be +1 or -1")
    out = []
    for n in n_range:
        d = n * n + 4 * p * sign
        if d < 5 or isqrt(d) ** 2 == d or not is_squarefree(d):
            continue
        reg = fundamental_unit(d).regulator
        big_l = log(d)
        full = big_l * big_l / (4 * log(p)) - (3 * big_l + 2 * log(p) + 5 * log(2))
        out.append(
            ScanRecord(
                n, n, (d,), (True,),
                regulator=reg, bound=full, bound_ok=reg >= full - 1e-9,
            )
        )
    return out


def yamamoto_simplified_bound(d: int, p: int) -> float:
    return log(d) ** 2 / (8 * log(p))


def scan_cubic(p: int, q: int, k_range) -> list[ScanRecord]:
    if not (is_prime(p) and is_prime(q) and p < q):
        raise ValueError("scan_cubic: need primes p < q")
    out = []
    for k in k_range:
        if k < 1:
            continue
        n = p**k * q + p + 1
        d = n * n - 4 * p
        if not is_squarefree(d):
            continue
        reg = fundamental_unit(d).regulator
        # the structural content: every p^j, j <= k, is the norm of a
        # reduced principal ideal, which is what makes the unit huge
        powers_present = all(
            is_norm_of_reduced_principal(d, p**j) for j in range(1, k + 1)
        )
        out.append(
            ScanRecord(
                k, n, (d,), (True,), regulator=reg, bound_ok=powers_present
            )
        )
    return out


def family_scan(kind: str, params: dict, scan_range) -> list[ScanRecord]:
    if kind == "chowla":
        return scan_chowla(scan_range)
    if kind == "shanks":
        return scan_shanks(scan_range)
    if kind == "yamamoto_plus":
        return scan_yamamoto(params["p"], scan_range, 1)
    if kind == "yamamoto_minus":
        return scan_yamamoto(params["p"], scan_range, -1)
    if kind == "cubic":
        return scan_cubic(params["p"], params["q"], scan_range)
    raise ValueError(f"family_scan: unknown kind {kind!r}")
