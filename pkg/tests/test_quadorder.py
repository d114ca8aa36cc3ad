import random
from math import gcd

import pytest

from qrl.intarith import divisors, is_discriminant
from qrl.quadorder import (
    QuadIdeal,
    QuadIrrational,
    canonical_irrational,
    classify,
    format_ideal_literal,
    ideal_power,
    make_ideal,
    module_product,
    multiply_ideals,
    parse_ideal_literal,
    reduced_preimage,
    unit_ideal,
)


def random_ideal(rng, d, allow_content=True):
    while True:
        b = d % 2 + 2 * rng.randrange(-400, 400)
        m = abs(b * b - d) // 4
        if m == 0:
            continue
        a = rng.choice(divisors(m))
        e = rng.choice((1, 1, 1, 2, 3)) if allow_content else 1
        return QuadIdeal(d, a, b, e)


def sample_discriminants(rng, count, lo=5, hi=10**6):
    out = []
    while len(out) < count:
        d = rng.randrange(lo, hi)
        if is_discriminant(d):
            out.append(d)
    return out


def test_make_ideal_examples():
    i = make_ideal(3, 1, 1, 13)
    assert i.norm == 3
    assert make_ideal(1, 1, 1, 13) == unit_ideal(13)
    with pytest.raises(ValueError, match="4ae"):
        make_ideal(2, 3, 1, 13)
    with pytest.raises(ValueError, match="2e"):
        make_ideal(3, 2, 1, 13)


def test_b_normalization():
    assert QuadIdeal(13, 3, 7) == QuadIdeal(13, 3, 1)
    assert QuadIdeal(13, 3, -5) == QuadIdeal(13, 3, 1)
    # b = a stays at a, not -a
    assert QuadIdeal(12, 2, -2).b == 2


def test_classify_examples():
    flags = classify(make_ideal(3, 1, 1, 13))
    assert flags.primitive and flags.regular and not flags.reduced
    flags = classify(unit_ideal(13))
    assert flags.primitive and flags.regular and flags.reduced
    flags = classify(make_ideal(3, 7, 1, 61))
    assert flags.reduced  # norm 3 < sqrt(61)/2
    # content 2: not primitive, never reduced
    flags = classify(make_ideal(3, 1, 2, 13))
    assert not flags.primitive and not flags.regular and not flags.reduced


def test_classify_conductor():
    # d = 45 = 5 * 3^2, conductor 3
    assert classify(make_ideal(3, 3, 1, 45)).prime_to_conductor is False
    assert classify(make_ideal(11, 21, 1, 45)).prime_to_conductor is True


def test_irregular_example():
    flags = classify(make_ideal(3, 3, 1, 45))
    assert flags.primitive and not flags.regular and not flags.reduced


def test_multiply_examples():
    a = make_ideal(3, 1, 1, 13)
    assert multiply_ideals(unit_ideal(13), a) == a
    assert multiply_ideals(a, a.conjugate()) == QuadIdeal(13, 1, 1, 3)
    sq = multiply_ideals(a, a)
    assert sq == QuadIdeal(13, 9, 7) and sq.e == 1


def test_multiply_mismatched_d():
    with pytest.raises(ValueError, match="discriminants differ"):
        multiply_ideals(unit_ideal(13), unit_ideal(17))


def test_multiply_irregular_pair_raises():
    a = make_ideal(3, 3, 1, 45)
    with pytest.raises(ValueError, match="irregular"):
        multiply_ideals(a, a)
    # the module product still exists: a^2 = 3*a, norm 27 != 9
    sq = module_product(a, a)
    assert sq == QuadIdeal(45, 3, 3, 3)
    assert sq.norm == 27


def test_ideal_power_examples():
    a = make_ideal(3, 1, 1, 13)
    assert ideal_power(a, 0) == unit_ideal(13)
    assert ideal_power(a, 1) == a
    p2 = ideal_power(a, 2)
    assert p2.norm == 9 and p2.e == 1


def test_to_ideal_examples():
    assert QuadIrrational(13, 1, 3).to_ideal() == unit_ideal(13)
    assert QuadIrrational(13, 3, 1).to_ideal() == make_ideal(3, 1, 1, 13)
    assert QuadIrrational(61, 3, 7).to_ideal() == make_ideal(3, 7, 1, 61)


def test_canonical_irrational():
    w = canonical_irrational(13)
    assert (w.a, w.b) == (1, 1)
    w = canonical_irrational(8)
    assert (w.a, w.b) == (1, 0)
    assert abs(w.value() - 8**0.5 / 2) < 1e-12


def test_irrational_validation():
    with pytest.raises(ValueError, match="4a"):
        QuadIrrational(13, 2, 3)
    with pytest.raises(ValueError, match="content"):
        QuadIrrational(45, 3, 3)


def test_norm_multiplicativity_random():
    rng = random.Random(7)
    for d in sample_discriminants(rng, 10):
        for _ in range(1000):
            i1, i2 = random_ideal(rng, d), random_ideal(rng, d)
            try:
                prod = multiply_ideals(i1, i2)
            except ValueError:
                continue  # both irregular: norms are genuinely not multiplicative
            assert prod.norm == i1.norm * i2.norm


def test_composition_matches_module_oracle():
    rng = random.Random(11)
    done = 0
    while done < 500:
        d = sample_discriminants(rng, 1)[0]
        i1, i2 = random_ideal(rng, d), random_ideal(rng, d)
        try:
            prod = multiply_ideals(i1, i2)
        except ValueError:
            continue
        assert prod == module_product(i1, i2)
        done += 1


def test_conjugation_law():
    rng = random.Random(13)
    done = 0
    while done < 200:
        d = sample_discriminants(rng, 1)[0]
        i1 = random_ideal(rng, d)
        if not classify(QuadIdeal(d, i1.a, i1.b)).regular:
            continue
        assert multiply_ideals(i1, i1.conjugate()) == QuadIdeal(
            d, 1, d % 2, i1.e * i1.e * i1.a
        )
        done += 1


def test_primitive_powers_stay_primitive():
    rng = random.Random(17)
    done = 0
    while done < 500:
        d = sample_discriminants(rng, 1)[0]
        i1 = random_ideal(rng, d, allow_content=False)
        if gcd(i1.a, d) != 1 or not classify(i1).regular:
            continue
        t = rng.randrange(7)
        assert ideal_power(i1, t).e == 1
        done += 1


def test_reduced_round_trip():
    rng = random.Random(19)
    seen_reduced = 0
    for d in sample_discriminants(rng, 40, hi=10**5):
        for _ in range(50):
            i1 = random_ideal(rng, d, allow_content=False)
            flags = classify(i1)
            rho = reduced_preimage(i1)
            if flags.reduced:
                assert rho is not None and rho.is_reduced()
                assert rho.to_ideal() == i1
                assert classify(rho.to_ideal()).reduced
                seen_reduced += 1
            else:
                assert rho is None or not rho.is_reduced()
    assert seen_reduced > 20


def test_reduced_irrational_maps_to_reduced_ideal():
    rng = random.Random(23)
    done = 0
    while done < 300:
        d = sample_discriminants(rng, 1, hi=10**5)[0]
        i1 = random_ideal(rng, d, allow_content=False)
        rho = reduced_preimage(i1)
        if rho is None:
            continue
        assert rho.is_reduced()
        assert classify(rho.to_ideal()).reduced
        done += 1


def test_ideal_literal_round_trip():
    for text, ideal in [
        ("1*[3,(1+sqrt(13))/2]", make_ideal(3, 1, 1, 13)),
        ("[3,(1+sqrt(13))/2]", make_ideal(3, 1, 1, 13)),
        ("3*[1,(1+sqrt(13))/2]", QuadIdeal(13, 1, 1, 3)),
        ("[9,(-5+sqrt(61))/2]", QuadIdeal(61, 9, -5)),
    ]:
        assert parse_ideal_literal(text) == ideal
    i = QuadIdeal(61, 9, -5, 2)
    assert parse_ideal_literal(format_ideal_literal(i)) == i
    with pytest.raises(ValueError, match="parse"):
        parse_ideal_literal("[3, (1+sqrt 13)/2]")
    with pytest.raises(ValueError, match="4ae"):
        parse_ideal_literal("[2,(3+sqrt(13))/2]")
