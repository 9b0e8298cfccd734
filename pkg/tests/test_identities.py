import math
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from triplemodes.exact import ExactKinematics, GaussianRational
from triplemodes.identities import (
    IDENTITY_NAMES,
    JacobianDirection,
    JacobianMethod,
    batch_from_arrays,
    check_counter_cancellation,
    check_delta_jacobian,
    check_evanescent_unimodular,
    check_principal_cancellation,
    check_surface_identity,
    check_te_bracket,
    check_tm_bracket,
    check_tm_te_substitution,
    exact_set,
    jacobian_closed_form,
    random_copropagating_pairs,
    random_counter_pairs,
    random_kinematics,
    run_suite,
    surface_identity_terms,
)
from triplemodes.medium import HalfSpaceMedium, make_kinematics
from triplemodes.modes import TransmissionRule, te_coefficients

SQ2 = math.sqrt(2.0)
SQ3 = math.sqrt(3.0)
G = GaussianRational


def exact_point(K_i, K_t, eps_i, kpar2, omega2, eps_t=1):
    return ExactKinematics(G(K_i), K_t if isinstance(K_t, G) else G(K_t), Fraction(eps_i),
                           Fraction(eps_t), Fraction(kpar2), Fraction(omega2), 1)


P21 = exact_point(2, 1, 2, 2, 3)  # n_i = sqrt2, omega^2 = 3, k^2 = 2


@pytest.fixture
def kin21():
    return make_kinematics(HalfSpaceMedium(SQ2), SQ3, SQ2, "L")


@pytest.fixture
def kin_co():
    # same k^2 = 2, omega'^2 = 6: K_i' = sqrt10, K_t' = 2
    return make_kinematics(HalfSpaceMedium(SQ2), math.sqrt(6.0), SQ2, "L")


def test_te_bracket_exact_at_hand_point():
    assert check_te_bracket(P21) == 0


def test_brackets_matched_media():
    kin = make_kinematics(HalfSpaceMedium(1.4, 1.4), 1.0, 0.3, "L")
    assert check_te_bracket(kin) == 0
    assert check_tm_bracket(kin) == 0


def test_tm_bracket_exact_at_hand_point(kin21):
    assert check_tm_bracket(P21) == 0
    assert check_tm_bracket(kin21) <= 1e-15


def test_evanescent_unimodular_examples():
    # K_i = 1, K_t = i with n_i^2 = 3, omega = 1
    assert check_evanescent_unimodular(exact_point(1, G(0, 1), 3, 2, 1)) == 0
    # K_i = 3, K_t = i/2 with n_i^2 = 2: omega^2 = 9.25, k^2 = 9.5
    kin = make_kinematics(HalfSpaceMedium(SQ2), math.sqrt(9.25), math.sqrt(9.5), "L")
    assert kin.K_i == pytest.approx(3.0) and kin.K_t.imag == pytest.approx(0.5)
    assert check_evanescent_unimodular(kin) <= 1e-15


def test_principal_cancellation_hand_pair(kin21, kin_co):
    assert kin_co.K_i == pytest.approx(math.sqrt(10.0))
    assert kin_co.K_t == pytest.approx(2.0)
    assert check_principal_cancellation(kin21, kin_co) <= 1e-13


def test_principal_cancellation_needs_distinct_frequencies(kin21):
    with pytest.raises(ValueError):
        check_principal_cancellation(kin21, kin21)
    with pytest.raises(ValueError):
        check_principal_cancellation(P21, P21)


def test_counter_cancellation_hand_pair(kin21):
    right = make_kinematics(HalfSpaceMedium(SQ2), 2.0, SQ2, "R")
    assert right.K_i == pytest.approx(-SQ2)
    assert right.K_t == pytest.approx(-math.sqrt(6.0))
    assert check_counter_cancellation(kin21, right) <= 1e-13
    with pytest.raises(ValueError):
        check_counter_cancellation(kin21, kin21)


def test_jacobian_factors(kin21):
    assert jacobian_closed_form(kin21, JacobianDirection.TE) == pytest.approx(1.0)
    assert jacobian_closed_form(kin21, JacobianDirection.TM) == pytest.approx(1.0)
    matched = make_kinematics(HalfSpaceMedium(1.3, 1.3), 1.0, 0.4, "L")
    assert jacobian_closed_form(matched, JacobianDirection.TE) == pytest.approx(1.0)
    for direction in JacobianDirection:
        assert check_delta_jacobian(P21, direction) == 0


def test_jacobian_finite_difference_contract():
    rng = np.random.default_rng(3)
    kin = random_kinematics(rng, 2000, "travelling")
    for direction in JacobianDirection:
        assert check_delta_jacobian(kin, direction, JacobianMethod.RICHARDSON) <= 1e-8
        assert check_delta_jacobian(kin, direction, JacobianMethod.COMPLEX_STEP) <= 1e-12


def test_surface_identity_hand_value(kin21, kin_co):
    r, t = te_coefficients(kin21)
    r2, t2 = te_coefficients(kin_co)
    lhs, rhs = surface_identity_terms(kin_co.K_i, kin_co.K_t, r, r2, t, t2)
    expected = 16 / (3 * (math.sqrt(10.0) + 2))
    assert lhs == pytest.approx(expected, abs=1e-14)
    assert rhs == pytest.approx(expected, abs=1e-14)
    assert expected == pytest.approx(1.03313, abs=1e-5)
    assert check_surface_identity(kin21, kin_co) <= 1e-15


def test_surface_identity_diagonal_exact():
    assert check_surface_identity(P21, P21) == 0


def test_substitution_hand_pairs(kin21, kin_co):
    # X_i = X_t at K = (2, 1): b_r = 0, the b-side identity holds trivially
    assert check_tm_te_substitution(P21, P21) == 0
    assert check_tm_te_substitution(kin21, kin_co) <= 1e-13


def test_exact_points_give_exact_zero():
    ex = exact_set(16)
    assert len(ex.travelling) >= 10 and len(ex.evanescent) >= 10
    assert len(ex.copropagating) >= 10 and len(ex.counter) >= 10
    for k in ex.travelling:
        assert check_te_bracket(k) == 0 and check_tm_bracket(k) == 0
        assert check_delta_jacobian(k, "te") == 0 and check_delta_jacobian(k, "tm") == 0
    for k in ex.evanescent:
        assert check_evanescent_unimodular(k) == 0
    for p, q in ex.copropagating:
        assert check_principal_cancellation(p, q) == 0
        assert check_surface_identity(p, q) == 0
        assert check_tm_te_substitution(p, q) == 0
    for p, q in ex.counter:
        assert check_counter_cancellation(p, q) == 0


def test_legacy_rule_fails_exactly():
    assert check_te_bracket(P21, TransmissionRule.LEGACY) != 0
    q = exact_set(4).copropagating[0]
    assert check_surface_identity(*q, TransmissionRule.LEGACY) != 0


def test_suite_passes():
    reports = run_suite(samples=2000, seed=11)
    assert [r.name for r in reports] == list(IDENTITY_NAMES)
    for r in reports:
        assert r.passed, r
        assert r.exact_verified and r.exact_points >= 10


def test_suite_legacy_failures():
    failed = {r.name for r in run_suite(samples=500, rule=TransmissionRule.LEGACY) if not r.passed}
    assert {"te_bracket", "surface_identity"} <= failed
    assert "tm_bracket" not in failed and "delta_jacobian" not in failed


def test_suite_guards():
    with pytest.raises(ValueError):
        run_suite(samples=0)
    with pytest.raises(ValueError):
        run_suite(samples=10, names=["nope"])


def test_report_record_is_deterministic():
    a = [r.to_record() for r in run_suite(samples=100, seed=5)]
    b = [r.to_record() for r in run_suite(samples=100, seed=5)]
    assert a == b
    assert "seconds" not in a[0]


# property tests: single random samples drawn by hypothesis

medium_eps = st.floats(1.05**2, 9.0)


@settings(max_examples=300, deadline=None)
@given(medium_eps, st.floats(0.3, 3.0), st.floats(0.0, 0.98), st.sampled_from([1, -1]))
def test_brackets_property(eps, omega, frac, sign):
    n_i = math.sqrt(eps) if sign > 0 else 1.0
    kin = batch_from_arrays([eps], [1.0], [omega], [(frac * min(n_i, 1.0) * omega) ** 2], [sign])
    assert check_te_bracket(kin) <= 1e-12
    assert check_tm_bracket(kin) <= 1e-12
    assert check_delta_jacobian(kin, "te", "complex-step") <= 1e-12


@settings(max_examples=300, deadline=None)
@given(medium_eps, st.floats(0.3, 3.0), st.floats(0.01, 0.99))
def test_unimodular_property(eps, omega, u):
    n = math.sqrt(eps)
    k = omega * (1.0 + u * (n - 1.0))
    kin = batch_from_arrays([eps], [1.0], [omega], [k * k], [1])
    assert np.all(np.imag(kin.K_t) > 0)
    assert check_evanescent_unimodular(kin) <= 1e-12


@settings(max_examples=100, deadline=None)
@given(st.integers(0, 2**32 - 1))
def test_pair_identities_property(seed):
    rng = np.random.default_rng(seed)
    co = random_copropagating_pairs(rng, 25)
    counter = random_counter_pairs(rng, 25)
    assert check_principal_cancellation(*co) <= 1e-12
    assert check_surface_identity(*co) <= 1e-12
    assert check_tm_te_substitution(*co) <= 1e-12
    assert check_counter_cancellation(*counter) <= 1e-12
