import random
from fractions import Fraction

import pytest

from eislift.qfield import QuadElem, kronecker, make_field


@pytest.fixture(scope="module")
def F12():
    return make_field(12)


def test_make_field_d12(F12):
    assert F12.m == 3
    assert F12.fund_unit == F12.element(2, 1)
    assert F12.fund_unit.norm() == 1
    assert F12.eps_plus == F12.element(2, 1)


def test_make_field_d5():
    F = make_field(5)
    assert F.fund_unit == QuadElem(Fraction(1, 2), Fraction(1, 2), 5)
    assert F.fund_unit.norm() == -1
    assert F.eps_plus == F.fund_unit * F.fund_unit


def test_make_field_rejects_non_fundamental():
    for bad in (14, -3, 9, 18, 1, 45):
        with pytest.raises(ValueError):
            make_field(bad)


def test_factor_prime_13_split(F12):
    typ, ps = F12.factor_prime(13)
    assert typ == "split"
    assert all(P.norm() == 13 for P in ps)
    c = F12.principal(F12.element(4, 1))  # totally positive generator
    assert F12.element(4, 1).is_totally_positive()
    assert c in ps
    # 13 = (4+sqrt3)(4-sqrt3)
    prod = ps[0].mul(ps[1])
    assert prod == F12.principal(F12.element(13))


def test_factor_prime_3_ramified(F12):
    typ, ps = F12.factor_prime(3)
    assert typ == "ramified"
    assert ps[0].norm() == 3
    assert ps[0] == F12.principal(F12.element(0, 1))
    assert ps[0].mul(ps[0]) == F12.principal(F12.element(3))


def test_factor_prime_rejects_composite(F12):
    with pytest.raises(ValueError):
        F12.factor_prime(15)


def test_ideal_norm_multiplicative(F12):
    rng = random.Random(4)
    ideals = [F12.unit_ideal, F12.different]
    for p in (2, 3, 11, 13, 23):
        if kronecker(12, p) != -1:
            ideals.extend(F12.prime_ideals_above(p))
    for _ in range(25):
        a = rng.choice(ideals)
        b = rng.choice(ideals)
        assert a.mul(b).norm() == a.norm() * b.norm()


def test_inverse_gives_unit_ideal(F12):
    for p in (2, 3, 13):
        for P in F12.prime_ideals_above(p):
            assert P.mul(P.inverse()) == F12.unit_ideal
    J = F12.principal(F12.element(Fraction(3, 7), Fraction(-2, 5)))
    assert J.mul(J.inverse()) == F12.unit_ideal


def test_principal_rejects_zero(F12):
    with pytest.raises(ValueError):
        F12.principal(F12.element(0, 0))


def test_narrow_class_group_orders():
    assert make_field(12).narrow_class_group().order == 2
    assert make_field(5).narrow_class_group().order == 1
    assert make_field(12).narrow_class_group().elementary_divisors == [2]


def test_narrow_vs_ordinary_kernel():
    # kernel of Cl+ -> Cl has order 2 iff the fundamental unit has norm +1
    for D in (5, 8, 12, 24, 40):
        F = make_field(D)
        hplus = F.narrow_class_group().order
        # ordinary class number of these fields is 1 except D=40 where h=2
        h = 2 if D == 40 else 1
        expected = h * (2 if F.fund_unit.norm() == 1 else 1)
        assert hplus == expected


def test_class_of_principal_ideals(F12):
    grp = F12.narrow_class_group()
    assert grp.class_of(F12.principal(F12.element(4, 1))) == 0
    # negative-norm generators land in the nontrivial class
    assert grp.class_of(F12.principal(F12.element(1, 1))) == 1
    assert grp.class_of(F12.principal(F12.element(0, 1))) == 1
    assert grp.class_of(F12.different) == 1


def test_totally_odd_characters_d12(F12):
    chars = F12.totally_odd_characters()
    assert len(chars) == 1
    chi = chars[0]
    assert chi.is_totally_odd
    assert chi.on_class(1) == -1
    assert chi(F12.different) == -1


def test_totally_odd_characters_d5_empty():
    assert make_field(5).totally_odd_characters() == []


def test_character_is_sign_of_norm_on_principals(F12):
    chi = F12.totally_odd_characters()[0]
    rng = random.Random(7)
    n = 0
    while n < 50:
        b = F12.element(rng.randint(-9, 9), rng.randint(-9, 9))
        if b.is_zero() or b.norm() == 0:
            continue
        n += 1
        assert chi(F12.principal(b)) == (1 if b.norm() > 0 else -1)


def test_narrow_equivalence_is_consistent(F12):
    grp = F12.narrow_class_group()
    ideals = [F12.unit_ideal, F12.different]
    for p in (2, 3, 11, 13):
        if kronecker(12, p) != -1:
            ideals.extend(F12.prime_ideals_above(p))
    for a in ideals:
        for b in ideals:
            cls = grp.class_of(a.mul(b))
            assert cls == grp.compose(grp.class_of(a), grp.class_of(b))


def test_divisors_between_examples(F12):
    nu = F12.element(Fraction(1, 2), 0)  # = sqrt(3)/(2 sqrt(3)), lies in d^-1
    divs = F12.divisors_between(nu, F12.unit_ideal)
    assert [d.norm() for d in divs] == [1, 3]
    sqrt3 = F12.principal(F12.element(0, 1))
    assert F12.divisors_between(nu, sqrt3) == [sqrt3]
    c13 = F12.principal(F12.element(4, 1))
    assert F12.divisors_between(nu, c13) == []


def test_divisors_between_rejects_non_integral(F12):
    with pytest.raises(ValueError):
        F12.divisors_between(F12.element(Fraction(1, 5), 0), F12.unit_ideal)


def test_factor_prime_reassembles(F12):
    for p in (2, 3, 11, 13, 23, 37):
        typ, ps = F12.factor_prime(p)
        prod = F12.unit_ideal
        if typ == "ramified":
            prod = ps[0].mul(ps[0])
        elif typ == "split":
            prod = ps[0].mul(ps[1])
        else:
            prod = ps[0]
        assert prod == F12.principal(F12.element(p))


def test_total_positivity_exact():
    F = make_field(12)
    assert F.element(4, 1).is_totally_positive()
    assert F.element(2, 1).is_totally_positive()
    assert not F.element(1, 1).is_totally_positive()  # 1 - sqrt3 < 0
    assert not F.element(-1, 0).is_totally_positive()
    # 7/4 > sqrt(3) > 12/7, exact comparisons against the irrational
    assert F.element(Fraction(7, 4), -1).is_totally_positive()
    assert not F.element(Fraction(12, 7), -1).is_totally_positive()
