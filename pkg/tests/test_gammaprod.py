import math
from fractions import Fraction as F

import mpmath as mp
import numpy as np
import pytest

from hypermono.exponents import raw_exponent_data, validate_irreducible
from hypermono.gammaprod import (
    balanced_gamma,
    balanced_gamma_jet,
    gamma_identity_residual,
    get_precision,
    precision_context,
    pw_growth_check,
    reciprocal_gamma,
    stirling_bound_check,
)

mp.mp.dps = 40


def test_reciprocal_gamma_anchors():
    assert reciprocal_gamma(1) == pytest.approx(1.0, rel=1e-14)
    assert reciprocal_gamma(0) == 0
    assert reciprocal_gamma(-1) == 0
    assert reciprocal_gamma(-7) == 0


def test_gamma_value_and_pole():
    from hypermono.gammaprod import gamma

    assert gamma(0.5) == pytest.approx(math.sqrt(math.pi), rel=1e-13)
    with pytest.raises(ZeroDivisionError):
        gamma(-2)


def test_reciprocal_gamma_against_mpmath():
    rng = np.random.default_rng(11)
    worst = 0.0
    for _ in range(400):
        r = 50.0 * math.sqrt(rng.random())
        th = 2 * math.pi * rng.random()
        s = r * np.exp(1j * th)
        ref = complex(mp.rgamma(mp.mpc(s.real, s.imag)))
        if ref == 0:
            continue
        worst = max(worst, abs(reciprocal_gamma(s) - ref) / abs(ref))
    assert worst <= 1e-13


def test_reciprocal_gamma_near_integers():
    for k in range(-30, 2):
        for eps in (1e-3, 1e-7, 1e-11):
            s = k + eps
            ref = complex(mp.rgamma(s))
            assert abs(reciprocal_gamma(s) - ref) <= 1e-13 * abs(ref)


def test_recurrence_property():
    rng = np.random.default_rng(5)
    for _ in range(200):
        s = complex(rng.uniform(-30, 30), rng.uniform(-30, 30))
        lhs = reciprocal_gamma(s + 1)
        rhs = reciprocal_gamma(s) / s
        if abs(lhs) < 1e-250:
            continue
        assert abs(lhs - rhs) <= 1e-12 * abs(lhs)


def test_balanced_gamma_anchors():
    d00 = raw_exponent_data((F(0),), (F(0),))
    assert balanced_gamma(d00, 0) == pytest.approx(1.0, rel=1e-13)
    assert balanced_gamma(d00, 0.5) == pytest.approx(2 / math.pi, rel=1e-13)
    d = validate_irreducible((F(0),), (F(1, 2),))
    assert balanced_gamma(d, -0.5) == pytest.approx(1 / math.sqrt(math.pi), rel=1e-12)


def test_balanced_gamma_reflection_oracle():
    # for alpha = beta = (0), G(s) = 1/(Gamma(s+1) Gamma(1-s)) = sin(pi s)/(pi s)
    d00 = raw_exponent_data((F(0),), (F(0),))
    rng = np.random.default_rng(1)
    for _ in range(50):
        s = complex(rng.uniform(-8, 8), rng.uniform(-8, 8))
        if abs(s) < 1e-3:
            continue
        ref = np.sin(np.pi * s) / (np.pi * s)
        assert abs(balanced_gamma(d00, s) - ref) <= 1e-12 * (abs(ref) + 1)


def test_balanced_gamma_entire_at_shifted_indices(suite):
    for data in suite:
        for x in (*data.alpha, *data.beta):
            for shift in (-3, -1, 0, 2):
                v = balanced_gamma(data, float(x) + shift)
                assert np.isfinite(v.real) and np.isfinite(v.imag)


def test_jet_order_zero_is_value():
    d = validate_irreducible((F(0), F(1, 3)), (F(1, 4), F(3, 4)))
    jet = balanced_gamma_jet(d, F(0), 0, 4)
    assert jet.value == pytest.approx(balanced_gamma(d, 4.0), rel=1e-12)


def test_jet_double_zero_at_negative_shift():
    # repeated alpha value: G(l + t) has a zero of order 2 at l < 0
    d = validate_irreducible((F(0), F(0)), (F(1, 4), F(1, 2)))
    jet = balanced_gamma_jet(d, F(0), 1, -1)
    assert jet.coefficients[0] == 0
    assert jet.coefficients[1] == 0


def test_jet_first_coefficient_finite_difference():
    d = validate_irreducible((F(0),), (F(1, 2),))
    jet = balanced_gamma_jet(d, F(0), 1, 0)
    assert jet.value == pytest.approx(2 / math.sqrt(math.pi), rel=1e-12)
    h = 1e-5
    fd = (balanced_gamma(d, h) - balanced_gamma(d, -h)) / (2 * h) / (2j * math.pi)
    assert jet.coefficients[1] == pytest.approx(fd, rel=1e-8)


@pytest.mark.parametrize("l", [0, 7, 60, 200, -4, -60, -200])
def test_jet_high_order_against_mpmath(l):
    d = validate_irreducible((F(0), F(1, 3)), (F(1, 4), F(3, 4)))

    def G(t):
        return (mp.rgamma(t + l + 1) * mp.rgamma(t + l - mp.mpf(1) / 3 + 1)
                * mp.rgamma(-t - l + mp.mpf(1) / 4 + 1)
                * mp.rgamma(-t - l + mp.mpf(3) / 4 + 1))

    jet = balanced_gamma_jet(d, F(0), 6, l)
    for r in range(7):
        ref = complex(mp.diff(G, 0, r)) / complex((2j * mp.pi) ** r)
        assert abs(jet.coefficients[r] - ref) <= 1e-10 * (abs(ref) + 1e-30)


def test_jet_beta_side_representative():
    # jets of G(-l + t) at the maximal beta representative, zeros included
    d = validate_irreducible((F(0),), (F(1, 3),))

    def G(t):
        return mp.rgamma(t + 1) * mp.rgamma(-t + mp.mpf(1) / 3 + 1)

    for l in (-1, -4):
        jet = balanced_gamma_jet(d, F(1, 3), 2, l)
        for r in range(3):
            ref = complex(mp.diff(lambda t: G(t + l + mp.mpf(1) / 3), 0, r))
            ref /= complex((2j * mp.pi) ** r)
            assert abs(jet.coefficients[r] - ref) <= 1e-11 * (abs(ref) + 1e-30)


def test_gamma_identity_examples():
    d = validate_irreducible((F(0),), (F(1, 2),))
    assert gamma_identity_residual(d, 0.5) <= 1e-12
    assert gamma_identity_residual(d, -1.0) == 0.0  # both sides vanish
    d2 = validate_irreducible((F(0), F(1, 2)), (F(1, 4), F(3, 4)))
    assert gamma_identity_residual(d2, 0.3 + 0.7j) <= 1e-11


def test_gamma_identity_random(suite):
    rng = np.random.default_rng(7)
    for data in suite:
        for _ in range(30):
            s = complex(rng.uniform(-5, 5), rng.uniform(-5, 5))
            assert gamma_identity_residual(data, s) <= 1e-10


def test_stirling_anchor():
    report = stirling_bound_check([1.0], C=1.0)
    assert report.passed
    ratio = report.checks["stirling_bound"].residual
    assert ratio == pytest.approx(math.sqrt(2) / math.e, rel=1e-12)


def test_stirling_large_positive():
    report = stirling_bound_check([10.0], C=1.0)
    assert report.checks["stirling_bound"].residual < 1.0


def test_stirling_grid_finite():
    xs = np.arange(-20, 21, dtype=float)
    grid = [complex(x, y) for x in xs for y in xs if not (y == 0 and x <= 0)]
    report = stirling_bound_check(grid, C=5.0)
    assert np.isfinite(report.checks["stirling_bound"].residual)
    assert report.passed


def test_stirling_requires_positive_C():
    with pytest.raises(ValueError):
        stirling_bound_check([1.0], C=0.0)
    with pytest.raises(ValueError):
        stirling_bound_check([], C=1.0)


def test_pw_growth(suite):
    for data in suite[:4]:
        report = pw_growth_check(data)
        assert report.passed, report.to_jsonable()


def test_extended_precision_matches_double():
    d = validate_irreducible((F(0), F(1, 3)), (F(1, 4), F(3, 4)))
    with precision_context("extended"):
        assert get_precision() == "extended"
        v_ext = balanced_gamma(d, 0.3 + 0.2j)
        r_ext = reciprocal_gamma(2.5 - 1j)
        j_ext = balanced_gamma_jet(d, F(0), 3, 5)
    assert get_precision() == "double"
    assert v_ext == pytest.approx(balanced_gamma(d, 0.3 + 0.2j), rel=1e-12)
    assert r_ext == pytest.approx(reciprocal_gamma(2.5 - 1j), rel=1e-12)
    j = balanced_gamma_jet(d, F(0), 3, 5)
    for a, b in zip(j_ext.coefficients, j.coefficients):
        assert a == pytest.approx(b, rel=1e-10)


def test_jet_rejects_negative_order():
    d = validate_irreducible((F(0),), (F(1, 2),))
    with pytest.raises(ValueError):
        balanced_gamma_jet(d, F(0), -1, 0)
