"""Angle resolution and continued-fraction expansions."""
from __future__ import annotations

from fractions import Fraction

import mpmath
import pytest

from ergolab.angles import AngleSpec, cf_convergents, continued_fraction, parse_angle
from ergolab.errors import PrecisionExhaustedError, RationalAngleError

from _oracles import surd_decimal


def test_rational_resolution():
    a = AngleSpec.rational(1, 3)
    assert a.is_rational
    assert a.as_fraction() == Fraction(1, 3)
    lo, hi = a.resolved.interval()
    assert lo < Fraction(1, 3) < hi
    assert a.resolved.err_ulps <= 1
    # dyadic rationals resolve exactly
    assert AngleSpec.rational(1, 4).resolved.is_exact


def test_rational_reduces_mod_one():
    a = AngleSpec.rational(7, 3)
    assert a.as_fraction() == Fraction(1, 3)


def test_golden_preset_matches_independent_evaluation():
    golden = AngleSpec.preset("golden")
    want = surd_decimal(-1, 1, 5, 2)
    got = mpmath.mpf(golden.resolved.mantissa) / mpmath.mpf(2) ** 192
    # resolved to within ~2 ulps at 192 bits: far beyond 50 digits
    assert abs(got - want) < mpmath.mpf(10) ** -55
    assert golden.resolved.err_ulps <= 1


def test_sqrt2_preset_keeps_raw_and_reduced_values():
    s = AngleSpec.preset("sqrt2")
    raw = mpmath.mpf(s.raw.mantissa) / mpmath.mpf(2) ** 192
    assert abs(raw - mpmath.sqrt(2)) < mpmath.mpf(10) ** -55
    reduced = mpmath.mpf(s.resolved.mantissa) / mpmath.mpf(2) ** 192
    assert abs(reduced - (mpmath.sqrt(2) - 1)) < mpmath.mpf(10) ** -55


def test_parse_angle_round_trip():
    for text in ["rational:3/7", "surd:(-1+1*sqrt(5))/2", "preset:golden", "preset:sqrt2"]:
        spec = parse_angle(text)
        again = parse_angle(spec.text())
        assert again.resolved.mantissa == spec.resolved.mantissa


def test_parse_angle_rejects_garbage():
    for bad in ["golden", "rational:1/0", "surd:(1+0*sqrt(5))/2", "surd:(1+1*sqrt(4))/2",
                "preset:nope", "surd:1+sqrt(2)"]:
        with pytest.raises(ValueError):
            parse_angle(bad)


def test_golden_convergents():
    got = cf_convergents(AngleSpec.preset("golden"), 5)
    assert got == [Fraction(0, 1), Fraction(1, 1), Fraction(1, 2), Fraction(2, 3), Fraction(3, 5)]


def test_sqrt2_convergents():
    got = cf_convergents(AngleSpec.preset("sqrt2"), 4)
    assert got == [Fraction(0, 1), Fraction(1, 2), Fraction(2, 5), Fraction(5, 12)]


def test_determinant_identity():
    cf = continued_fraction(AngleSpec.preset("golden"), 30)
    conv = cf.convergents
    for k in range(1, len(conv)):
        p, q = conv[k]
        pp, qq = conv[k - 1]
        assert p * qq - pp * q == (-1) ** (k - 1)


def test_convergent_quality_bound():
    """|q_k * alpha - p_k| < 1/q_{k+1}, checked with interval arithmetic."""
    alpha = AngleSpec.preset("golden")
    conv = continued_fraction(alpha, 25).convergents
    for k in range(len(conv) - 1):
        p, q = conv[k]
        q_next = conv[k + 1][1]
        scaled = alpha.resolved.scaled(q)
        lo, hi = scaled.interval()
        err = max(abs(lo - p), abs(hi - p))
        assert err < Fraction(1, q_next)


def test_rational_angle_has_no_expansion():
    with pytest.raises(RationalAngleError):
        continued_fraction(AngleSpec.rational(1, 3), 3)


def test_depth_beyond_precision_raises():
    with pytest.raises(PrecisionExhaustedError):
        continued_fraction(AngleSpec.preset("golden"), 500)


def test_quotients_of_quadratic_surds_are_eventually_periodic():
    cf = continued_fraction(AngleSpec.preset("golden"), 40)
    assert set(cf.quotients[1:]) == {1}
    cf2 = continued_fraction(AngleSpec.preset("sqrt2"), 40)
    assert set(cf2.quotients[1:]) == {2}
