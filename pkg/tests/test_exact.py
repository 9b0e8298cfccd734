from fractions import Fraction

import pytest
from hypothesis import given
from hypothesis import strategies as st

from triplemodes.exact import GaussianRational, rational_pairs, rational_points

small = st.fractions(min_value=-50, max_value=50, max_denominator=40)
gaussian = st.builds(GaussianRational, small, small)


@given(gaussian, gaussian)
def test_field_axioms_against_complex(a, b):
    for got, want in ((a + b, complex(a) + complex(b)), (a - b, complex(a) - complex(b)),
                      (a * b, complex(a) * complex(b))):
        assert complex(got) == pytest.approx(want, rel=1e-12, abs=1e-12)
    if not b.is_zero():
        assert (a / b) * b == a


@given(gaussian)
def test_conjugate_and_modulus(a):
    assert a * a.conjugate() == GaussianRational(a.abs2())
    assert a.conjugate().conjugate() == a
    assert -(-a) == a


def test_mixed_operands():
    z = GaussianRational(1, 2)
    assert 1 + z == GaussianRational(2, 2)
    assert z - Fraction(1, 2) == GaussianRational(Fraction(1, 2), 2)
    assert 2 / GaussianRational(0, 1) == GaussianRational(0, -2)
    assert z**2 == GaussianRational(-3, 4)
    assert z**-1 * z == 1
    with pytest.raises(ZeroDivisionError):
        z / GaussianRational(0, 0)


def test_rational_point_catalogue():
    points = rational_points()
    assert len(points) == 935
    assert sum(p.evanescent for p in points) == 720
    for p in points:
        r1, r2 = p.dispersion_residuals()
        assert r1.is_zero() and r2.is_zero()
        assert p.kpar2 >= 0 and p.omega2 > 0
        if p.evanescent:
            assert p.K_t.re == 0 and p.K_t.im > 0
        else:
            assert p.K_t.im == 0 and p.K_t.re > 0


def test_pairs_cover_all_regime_combinations():
    pairs = rational_pairs(rational_points())
    assert len(pairs) == 474
    combos = {(p.evanescent, q.evanescent) for p, q in pairs}
    assert combos == {(False, False), (False, True), (True, False), (True, True)}
    for p, q in pairs:
        assert p.kpar2 == q.kpar2 and p.eps_i == q.eps_i and p.omega2 != q.omega2


def test_mirrored_point_is_valid_right_mode():
    p = next(p for p in rational_points() if not p.evanescent)
    m = p.mirrored()
    assert m.sign == -1
    assert m.K_i == -p.K_t and m.K_t == -p.K_i
    r1, r2 = m.dispersion_residuals()
    assert r1.is_zero() and r2.is_zero()
    evanescent = next(p for p in rational_points() if p.evanescent)
    with pytest.raises(ValueError):
        evanescent.mirrored()
