import math
from fractions import Fraction

import pytest

from eislift.lfunc import (
    NOT_GENUS,
    LContext,
    detect_rational,
    dirichlet_l0_exact,
    dirichlet_partial,
    genus_exact_L0,
    genus_factorizations,
    genus_lprime0,
    ideal_count_of_norm,
    lambda_continuation,
)
from eislift.qfield import make_field


@pytest.fixture(scope="module")
def F12():
    return make_field(12)


@pytest.fixture(scope="module")
def chi12(F12):
    return F12.totally_odd_characters()[0]


@pytest.fixture(scope="module")
def ctx(F12, chi12):
    return LContext(F12, chi12)


def test_dirichlet_l0_exact_values():
    assert dirichlet_l0_exact(-3) == Fraction(1, 3)
    assert dirichlet_l0_exact(-4) == Fraction(1, 2)
    assert dirichlet_l0_exact(-8) == Fraction(1, 1)


def test_genus_factorization_d12(F12, chi12):
    assert genus_factorizations(12) == [(-3, -4)]
    assert genus_exact_L0(F12, chi12) == Fraction(1, 6)


def test_genus_factorizations_filter_fundamentality():
    from eislift.lfunc import is_fundamental_any

    pairs = genus_factorizations(60)
    assert sorted(pairs) == [(-4, -15), (-3, -20)]
    for d1, d2 in pairs:
        assert d1 * d2 == 60
        assert is_fundamental_any(d1) and is_fundamental_any(d2)
    # (-5)(-12) is excluded: -5 is not a fundamental discriminant
    assert (-5, -12) not in pairs and (-12, -5) not in pairs


def test_dirichlet_partial_real_and_counts(F12, chi12):
    lv = dirichlet_partial(F12, chi12, 2.0, 600)
    assert abs(complex(lv.value).imag) < 1e-14
    assert lv.error < math.inf
    # both primes above 13 are narrowly principal: chi = +1, count 2
    assert ideal_count_of_norm(F12, 13) == 2
    with pytest.raises(ValueError):
        dirichlet_partial(F12, chi12, 1.0, 100)


def test_lambda_at_zero_is_l0(ctx):
    assert ctx.lambda_value(0.0) == pytest.approx(1.0 / 6.0, abs=1e-12)


def test_lambda_continuation_matches_dirichlet_deep(F12, chi12, ctx):
    dp = dirichlet_partial(F12, chi12, 4.0, 20000)
    assert abs(ctx.l_value(4.0) - dp.value) <= dp.error + 1e-10
    lv = lambda_continuation(F12, chi12, 0.0)
    assert lv.method == "CONTINUED"
    assert lv.value == pytest.approx(1.0 / 6.0, abs=1e-10)


def test_lambda_real_on_real_axis(ctx):
    for w in (-2.0, -0.7, 0.4, 1.0, 3.0):
        assert isinstance(ctx.lambda_value(w), float)


def test_lambda_derivative_matches_genus_oracle(F12, chi12, ctx):
    lp = genus_lprime0(F12, chi12)
    gamma = 0.5772156649015328606
    oracle = lp - math.log(4 * math.pi * math.exp(gamma)) * (1.0 / 6.0)
    assert ctx.lambda_derivative0() == pytest.approx(oracle, abs=1e-12)


def test_lambda_derivative_matches_central_difference(ctx):
    h = 1e-4
    fd = (ctx.lambda_value(h) - ctx.lambda_value(-h)) / (2 * h)
    assert ctx.lambda_derivative0() == pytest.approx(fd, abs=5e-8)


def test_partial_sums_alternate_around_limit(F12, chi12, ctx):
    # monitored sign structure of the Euler product for D = 12
    limit = ctx.l_value(2.0)
    diffs = [dirichlet_partial(F12, chi12, 2.0, B).value - limit for B in (40, 90, 200, 500)]
    assert any(d > 0 for d in diffs) and any(d < 0 for d in diffs)


def test_rational_detection_two_precisions(F12, chi12):
    v1 = LContext(F12, chi12, tol=1e-10).lambda_value(0.0)
    v2 = LContext(F12, chi12, tol=1e-13).lambda_value(0.0)
    assert detect_rational([v1, v2]) == Fraction(1, 6)
    assert detect_rational([0.1661, 1.0 / 6.0]) is None


def test_not_genus_path():
    # D = 40 has a norm -1 unit: no totally odd character exists, so fake a
    # character table that matches no genus factorization by probing the
    # matcher directly with D = 12's field and flipped values
    F = make_field(12)

    class FakeChi:
        values = (1, 1)

        def __call__(self, ideal):
            return -1 if ideal.norm() == 3 else 1

        def on_class(self, i):
            return 1

        is_totally_odd = True

    assert genus_exact_L0(F, FakeChi()) == NOT_GENUS
