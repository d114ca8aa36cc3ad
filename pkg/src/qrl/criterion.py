"""Regulator lower bounds from power products of reduced principal ideals.

Given a real quadratic discriminant d and integers that occur as norms of
reduced principal ideals, every power product whose norm stays below
sqrt(d)/2 is again a reduced principal ideal (under coprimality hypotheses
verified here), so the sum of the logarithms of the attached reduced
irrationals bounds the regulator from below.  This module

* validates the hypotheses for a list of norm decompositions,
* clears ramified norm parts by squaring them away (verified by exact
  ideal arithmetic),
* enumerates the power-product set constructively, asserting that each
  member really is a primitive reduced ideal,
* evaluates the discrete bound, the exact logarithm sum, and the
  continuous (simplex-integral) approximation of the discrete sum,
* constructs explicit parameter families in which a product of two
  primitive ideals of norm below sqrt(d)/2 fails to be primitive.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from math import gcd
from typing import Iterator, Sequence

from mpmath import mp

from .cfrac import fundamental_unit, is_norm_of_reduced_principal, principal_expansion
from .intarith import fundamental_decomposition, is_discriminant, is_squarefree
from .quadorder import (
    QuadIdeal,
    classify,
    format_ideal_literal,
    ideal_power,
    make_ideal,
    module_product,
    multiply_ideals,
    reduced_preimage,
    unit_ideal,
)

__all__ = [
    "CriterionError",
    "NormSplit",
    "CriterionInput",
    "SplitChecks",
    "HypothesisReport",
    "check_hypotheses",
    "clear_ramified_parts",
    "PowerProductSet",
    "enumerate_power_products",
    "BoundReport",
    "regulator_lower_bound",
    "evaluate_criterion",
    "simplex_integral",
    "simplex_integral_from_log",
    "LatticeGap",
    "lattice_integral_gap",
    "NonprimitiveProduct",
    "nonprimitive_product_example",
    "search_nonprimitive_example",
]


class CriterionError(ValueError):
    """A hypothesis or construction step of the bound criterion failed."""


@dataclass(frozen=True)
class NormSplit:
    """A norm written as coprime_part * ramified_part.

    The coprime part is intended to be coprime to the discriminant and the
    ramified part to be a squarefree divisor of the fundamental
    discriminant; both intentions are verified by check_hypotheses, not
    assumed here.
    """

    total: int
    coprime_part: int
    ramified_part: int

    def __post_init__(self):
        if self.total < 1 or self.coprime_part < 1 or self.ramified_part < 1:
            raise CriterionError("norm split parts must be positive")
        if self.coprime_part * self.ramified_part != self.total:
            raise CriterionError(
                f"norm split {self.coprime_part}*{self.ramified_part}"
                f" != {self.total}"
            )


@dataclass(frozen=True)
class CriterionInput:
    """A discriminant together with the norm decompositions to examine."""

    d: int
    splits: tuple[NormSplit, ...]

    def __post_init__(self):
        if not is_discriminant(self.d):
            raise CriterionError(f"{self.d} is not a real quadratic discriminant")


@dataclass(frozen=True)
class SplitChecks:
    """Per-decomposition hypothesis results."""

    norm_in_cycle: bool
    coprime_part_ok: bool
    ramified_part_ok: bool

    @property
    def all_ok(self) -> bool:
        return self.norm_in_cycle and self.coprime_part_ok and self.ramified_part_ok


@dataclass(frozen=True)
class HypothesisReport:
    d: int
    per_split: tuple[SplitChecks, ...]
    pairwise_coprime: bool
    offending_pair: tuple[int, int] | None
    all_pass: bool


def check_hypotheses(inp: CriterionInput) -> HypothesisReport:
    """Check, per decomposition: the total is the norm of a reduced principal
    ideal; the coprime part is coprime to d; the ramified part is a squarefree
    divisor of the fundamental discriminant; and globally that the coprime
    parts are pairwise coprime."""
    d0 = fundamental_decomposition(inp.d).fundamental
    per = tuple(
        SplitChecks(
            norm_in_cycle=is_norm_of_reduced_principal(inp.d, sp.total),
            coprime_part_ok=gcd(sp.coprime_part, inp.d) == 1,
            ramified_part_ok=bool(is_squarefree(sp.ramified_part))
            and d0 % sp.ramified_part == 0,
        )
        for sp in inp.splits
    )
    offending = None
    for i in range(len(inp.splits)):
        for j in range(i + 1, len(inp.splits)):
            if gcd(inp.splits[i].coprime_part, inp.splits[j].coprime_part) != 1:
                offending = (i, j)
                break
        if offending:
            break
    all_pass = offending is None and all(ck.all_ok for ck in per)
    return HypothesisReport(inp.d, per, offending is None, offending, all_pass)


def _ramified_ideal(d: int, r: int) -> QuadIdeal:
    """The primitive ideal of norm r when r divides d (r squarefree)."""
    for b in range(d % 2, 2 * r + 1, 2):
        if (b * b - d) % (4 * r) == 0:
            return make_ideal(r, b, 1, d)
    raise CriterionError(f"no primitive ideal of norm {r} exists for d={d}")


def clear_ramified_parts(inp: CriterionInput) -> CriterionInput:
    """Replace each norm by the square of its coprime part.

    For a decomposition n = n_c * n_r with n_r > 1, the norm-n_r ideal must
    square to n_r times the unit ideal; this is verified by the exact module
    product and a failure raises (it indicates the ramified part does not
    actually behave as a product of distinct ramified primes, e.g. because
    it shares a factor with the conductor).  Entries whose coprime part is 1
    reduce to the unit ideal and are dropped.
    """
    new_splits: list[NormSplit] = []
    for sp in inp.splits:
        if sp.ramified_part == 1:
            new_splits.append(sp)
            continue
        frak = _ramified_ideal(inp.d, sp.ramified_part)
        square = module_product(frak, frak)
        expected = make_ideal(1, inp.d % 2, sp.ramified_part, inp.d)
        if square != expected:
            raise CriterionError(
                f"square of {format_ideal_literal(frak)} is"
                f" {format_ideal_literal(square)}, not {sp.ramified_part} times"
                f" the unit ideal; the ramified part {sp.ramified_part}"
                f" of {sp.total} cannot be cleared"
            )
        c = sp.coprime_part
        if c == 1:
            continue
        new_splits.append(NormSplit(c * c, c * c, 1))
    return CriterionInput(inp.d, tuple(new_splits))


@dataclass(frozen=True)
class PowerProductSet:
    """All products of the base ideals with norm below sqrt(d)/2."""

    d: int
    norms: tuple[int, ...]
    vectors: tuple[tuple[int, ...], ...]
    ideals: tuple[QuadIdeal, ...]


def _cycle_ideal_of_norm(d: int, n: int) -> QuadIdeal:
    """First ideal of norm n along the principal cycle."""
    for rho in principal_expansion(d).cycle:
        if rho.a == n:
            return rho.to_ideal()
    raise CriterionError(
        f"{n} is not the norm of a reduced principal ideal for d={d}"
    )


def _bounded_vectors(
    d: int, norms: Sequence[int], strict: bool = True
) -> Iterator[tuple[tuple[int, ...], int]]:
    """Exponent vectors e >= 0 with 4*A**2 < d (or <= d when strict=False),
    A = prod(norms[i]**e[i]), in lexicographic order, paired with A."""

    def fits(a: int) -> bool:
        return 4 * a * a < d if strict else 4 * a * a <= d

    m = len(norms)
    vec = [0] * m

    def rec(i: int, prod: int) -> Iterator[tuple[tuple[int, ...], int]]:
        if i == m:
            yield tuple(vec), prod
            return
        e, p = 0, prod
        while fits(p):
            vec[i] = e
            yield from rec(i + 1, p)
            e += 1
            p *= norms[i]
        vec[i] = 0

    if fits(1):
        yield from rec(0, 1)


def enumerate_power_products(d: int, norms: Sequence[int]) -> PowerProductSet:
    """Products of the chosen norm-n ideals with norm below sqrt(d)/2.

    Membership is verified constructively: every product ideal is built by
    explicit composition and must come out primitive and reduced, else this
    raises.  The zero exponent vector (the unit ideal) is always included.
    """
    if not is_discriminant(d):
        raise CriterionError(f"{d} is not a real quadratic discriminant")
    norms = tuple(int(n) for n in norms)
    if any(n < 2 for n in norms):
        raise CriterionError("all norms must be >= 2")
    base = [_cycle_ideal_of_norm(d, n) for n in norms]
    vectors: list[tuple[int, ...]] = []
    ideals: list[QuadIdeal] = []
    seen: set[int] = set()
    for vec, prod in _bounded_vectors(d, norms, strict=True):
        if prod in seen:
            raise CriterionError(
                f"duplicate power product {prod}:"
                f" the norms {norms} are multiplicatively dependent"
            )
        seen.add(prod)
        ideal = unit_ideal(d)
        try:
            for base_ideal, e in zip(base, vec):
                if e:
                    ideal = multiply_ideals(ideal, ideal_power(base_ideal, e))
        except ValueError as exc:
            raise CriterionError(
                f"cannot build the power product for exponents {vec}: {exc}"
            ) from exc
        if ideal.e != 1 or not classify(ideal).reduced:
            raise CriterionError(
                f"power product {format_ideal_literal(ideal)} for exponents"
                f" {vec} is not a primitive reduced ideal"
            )
        vectors.append(vec)
        ideals.append(ideal)
    return PowerProductSet(d, norms, tuple(vectors), tuple(ideals))


@dataclass(frozen=True)
class BoundReport:
    """Regulator lower bounds extracted from a power-product set.

    discrete_sum uses only the norms (each term log(sqrt(d)/2) minus the log
    of the product norm); exact_sum uses the true reduced irrational of each
    ideal; both are bounded by the regulator.  integral is the continuous
    approximation of discrete_sum and log_norm_product the product of the
    log norms appearing in it.
    """

    d: int
    norms: tuple[int, ...]
    discrete_sum: float
    exact_sum: float
    integral: float
    lattice_count: int
    log_norm_product: float
    regulator: float


def regulator_lower_bound(products: PowerProductSet, dps: int = 30) -> BoundReport:
    """Evaluate the discrete and exact regulator lower bounds for a
    power-product set, together with the matching simplex integral."""
    d = products.d
    with mp.workdps(dps):
        root = mp.sqrt(d)
        big_l = mp.log(root / 2)
        logs = [mp.log(n) for n in products.norms]
        discrete = mp.fsum(
            big_l - mp.fsum(e * ln for e, ln in zip(vec, logs))
            for vec in products.vectors
        )
        exact_terms = []
        for ideal in products.ideals:
            rho = reduced_preimage(ideal)
            if rho is None:
                raise CriterionError(
                    f"{format_ideal_literal(ideal)} has no reduced irrational"
                    " preimage; instance rejected"
                )
            exact_terms.append(mp.log((rho.b + root) / (2 * rho.a)))
        exact = float(mp.fsum(exact_terms))
        discrete = float(discrete)
    log_norm_product = 1.0
    for n in products.norms:
        log_norm_product *= math.log(n)
    return BoundReport(
        d=d,
        norms=products.norms,
        discrete_sum=discrete,
        exact_sum=exact,
        integral=simplex_integral(d, products.norms),
        lattice_count=len(products.vectors),
        log_norm_product=log_norm_product,
        regulator=fundamental_unit(d, dps=dps).regulator,
    )


def evaluate_criterion(
    inp: CriterionInput, require_hypotheses: bool = True, dps: int = 30
) -> tuple[HypothesisReport, BoundReport]:
    """Full pipeline: hypothesis checks, ramified clearing, enumeration, bound."""
    report = check_hypotheses(inp)
    if require_hypotheses and not report.all_pass:
        problems = []
        for i, ck in enumerate(report.per_split):
            sp = inp.splits[i]
            if not ck.norm_in_cycle:
                problems.append(
                    f"{sp.total} is not the norm of a reduced principal ideal"
                )
            if not ck.coprime_part_ok:
                problems.append(f"gcd({sp.coprime_part}, {inp.d}) != 1")
            if not ck.ramified_part_ok:
                problems.append(
                    f"{sp.ramified_part} is not a squarefree divisor of the"
                    " fundamental discriminant"
                )
        if not report.pairwise_coprime:
            i, j = report.offending_pair
            problems.append(
                f"coprime parts of entries {i} and {j} share a common factor"
            )
        raise CriterionError("hypotheses fail: " + "; ".join(problems))
    cleared = clear_ramified_parts(inp)
    products = enumerate_power_products(
        inp.d, [sp.total for sp in cleared.splits]
    )
    return report, regulator_lower_bound(products, dps=dps)


def simplex_integral_from_log(bound_log: float, norms: Sequence[int]) -> float:
    """Integral of (bound_log - sum_i x_i*log(n_i)) over the simplex where the
    x_i are nonnegative and that sum is at most bound_log.

    Substituting u_i = x_i*log(n_i) maps the region onto the standard scaled
    simplex, giving the closed form bound_log**(m+1) / ((m+1)! * prod log n_i)
    (for m = 0 this degenerates to bound_log itself, matching the one-point
    lattice sum).
    """
    if any(n < 2 for n in norms):
        raise CriterionError("all norms must be >= 2")
    if bound_log <= 0:
        return 0.0
    m = len(norms)
    p_product = 1.0
    for n in norms:
        p_product *= math.log(n)
    return bound_log ** (m + 1) / (math.factorial(m + 1) * p_product)


def simplex_integral(d: int, norms: Sequence[int]) -> float:
    """Continuous approximation of the discrete bound sum for discriminant d:
    the simplex integral with upper log-bound log(sqrt(d)/2)."""
    if d < 5:
        raise CriterionError("d must be at least 5")
    return simplex_integral_from_log(0.5 * math.log(d) - math.log(2.0), norms)


@dataclass(frozen=True)
class LatticeGap:
    """Lattice sum vs. simplex integral for one bound region."""

    d: int
    norms: tuple[int, ...]
    lattice_sum: float
    integral: float
    diff: float
    lattice_count: int


def lattice_integral_gap(d: int, norms: Sequence[int]) -> LatticeGap:
    """Compare the lattice sum over integer exponent vectors (product of
    norms**e at most sqrt(d)/2) with the simplex integral.

    d only enters through log(sqrt(d)/2), so any integer d >= 5 is accepted
    here, discriminant or not.
    """
    if d < 5:
        raise CriterionError("d must be at least 5")
    norms = tuple(int(n) for n in norms)
    if any(n < 2 for n in norms):
        raise CriterionError("all norms must be >= 2")
    big_l = 0.5 * math.log(d) - math.log(2.0)
    logs = [math.log(n) for n in norms]
    total, count = 0.0, 0
    for vec, _prod in _bounded_vectors(d, norms, strict=False):
        total += big_l - sum(e * ln for e, ln in zip(vec, logs))
        count += 1
    integral = simplex_integral_from_log(big_l, norms)
    return LatticeGap(d, norms, total, integral, total - integral, count)


@dataclass(frozen=True)
class NonprimitiveProduct:
    """An explicit product of two primitive ideals that is not primitive.

    The parameters (r, s, t, k, c) determine p = r*s, q = t*p + r,
    A = p**k * q and d = (A + c)**2 + 4*A, together with a triple of
    primitive ideals of norms r*s, r*(t*s+1) and s*(t*s+1).  The product of
    the first two has content exactly r > 1 even though its norm r*s*q can
    lie below sqrt(d)/2, so norm size alone does not guarantee primitivity
    of a product.  subset_sums reports the discrete bound contribution of
    each admissible exponent support (supports containing both factor 1 and
    factor 2 are excluded, since those products leave the primitive reduced
    world).
    """

    params: tuple[int, int, int, int, int]
    d: int
    factor_1: QuadIdeal
    factor_2: QuadIdeal
    companion: QuadIdeal
    product: QuadIdeal
    product_content: int
    product_norm: int
    norm_bound_ok: bool
    subset_sums: dict[str, float]


def nonprimitive_product_example(
    r: int, s: int, t: int, k: int, c: int
) -> NonprimitiveProduct:
    """Build the ideal triple for parameters (r, s, t, k, c) and multiply the
    first two members; raises when the parameters give no valid triple or the
    product content is not exactly r."""
    if r < 2 or s < 2 or t < 1 or k < 1 or c < 1:
        raise CriterionError(
            "parameters must satisfy r >= 2, s >= 2, t >= 1, k >= 1, c >= 1"
        )
    p = r * s
    q = t * p + r
    if gcd(q, c) != 1:
        raise CriterionError(f"c={c} must be coprime to q={q}")
    a_val = p**k * q
    d = (a_val + c) ** 2 + 4 * a_val
    try:
        factor_1 = make_ideal(r * s, a_val - c, 1, d)
        factor_2 = make_ideal(r * (t * s + 1), a_val + c, 1, d)
        companion = make_ideal(
            s * (t * s + 1), a_val + p + 1 - 2 * s * (t * s - t + 1), 1, d
        )
    except ValueError as exc:
        raise CriterionError(
            f"parameters (r,s,t,k,c)=({r},{s},{t},{k},{c}) give no valid"
            f" ideal triple: {exc}"
        ) from exc
    product = module_product(factor_1, factor_2)
    norm_product = factor_1.norm * factor_2.norm
    if product.norm != norm_product:
        raise CriterionError(
            f"product norm {product.norm} is not multiplicative"
            f" (expected {norm_product}); a factor is not regular"
        )
    if product.e != r:
        raise CriterionError(
            f"product content is {product.e}, not r={r}, for parameters"
            f" (r,s,t,k,c)=({r},{s},{t},{k},{c})"
        )
    big_l = 0.5 * math.log(d) - math.log(2.0)
    norms3 = (factor_1.norm, factor_2.norm, companion.norm)
    logs = [math.log(n) for n in norms3]
    subset_sums: dict[str, float] = {}
    for vec, _prod in _bounded_vectors(d, norms3, strict=True):
        support = tuple(i for i, e in enumerate(vec) if e)
        if 0 in support and 1 in support:
            continue
        key = ",".join(str(i + 1) for i in support) if support else "unit"
        term = big_l - sum(e * ln for e, ln in zip(vec, logs))
        subset_sums[key] = subset_sums.get(key, 0.0) + term
    return NonprimitiveProduct(
        params=(r, s, t, k, c),
        d=d,
        factor_1=factor_1,
        factor_2=factor_2,
        companion=companion,
        product=product,
        product_content=product.e,
        product_norm=norm_product,
        norm_bound_ok=4 * norm_product * norm_product < d,
        subset_sums=subset_sums,
    )


def search_nonprimitive_example(
    r_max: int = 5, s_max: int = 5, t_max: int = 4, k_max: int = 5, c_max: int = 50
) -> NonprimitiveProduct:
    """First parameter tuple, in lexicographic order, whose ideal triple is
    valid, whose first two ideals are reduced, and whose non-primitive product
    still has norm below sqrt(d)/2."""
    for r in range(2, r_max + 1):
        for s in range(2, s_max + 1):
            for t in range(1, t_max + 1):
                for k in range(1, k_max + 1):
                    for c in range(1, c_max + 1):
                        try:
                            rec = nonprimitive_product_example(r, s, t, k, c)
                        except CriterionError:
                            continue
                        if not rec.norm_bound_ok:
                            continue
                        if not (
                            classify(rec.factor_1).reduced
                            and classify(rec.factor_2).reduced
                        ):
                            continue
                        return rec
    raise CriterionError(
        "no non-primitive product instance found within the search bounds"
    )
