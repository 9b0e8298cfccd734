import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from triplemodes.medium import HalfSpaceMedium, make_kinematics
from triplemodes.modes import (
    NormalizationVariant,
    Polarization,
    TransmissionRule,
    build_mode,
    fresnel_pair,
    legacy_transmission,
    polarization_vector,
    te_coefficients,
    tm_coefficients,
)

SQ2 = math.sqrt(2.0)
SQ3 = math.sqrt(3.0)


@pytest.fixture
def kin_21():
    """n_left = sqrt2, omega = sqrt3, |k_par| = sqrt2: K_i = 2, K_t = 1."""
    return make_kinematics(HalfSpaceMedium(SQ2), SQ3, SQ2, "L")


def test_te_coefficients_hand_values(kin_21):
    r, t = te_coefficients(kin_21)
    assert r == pytest.approx(1 / 3, abs=1e-15)
    assert t == pytest.approx(4 / 3, abs=1e-15)


def test_matched_media_no_reflection():
    kin = make_kinematics(HalfSpaceMedium(1.3, 1.3), 2.0, 0.7, "L")
    r, t = te_coefficients(kin)
    assert r == 0 and t == 1
    r, t = tm_coefficients(kin)
    assert r == 0 and t == 1


def test_evanescent_te_unit_values():
    # n_left^2 = 3, omega = 1, |k_par|^2 = 2: K_i = 1, K_t = i
    kin = make_kinematics(HalfSpaceMedium(SQ3), 1.0, SQ2, "L")
    r, t = te_coefficients(kin)
    assert r == pytest.approx(-1j, abs=1e-15)
    assert t == pytest.approx(1 - 1j, abs=1e-15)
    assert abs(r) == pytest.approx(1.0, abs=1e-15)


def test_fresnel_pair_is_generic():
    r, t = fresnel_pair(1, 1j)
    assert r == -1j and t == 1 - 1j
    # X_i = 1 real, X_t purely imaginary: unimodular for any n_t
    for n_t in (1.0, 1.7, 3.1):
        r, _ = fresnel_pair(1.0, 1j / n_t**2)
        assert abs(r) == pytest.approx(1.0, abs=1e-15)


def test_tm_brewster_coincidence(kin_21):
    assert kin_21.X_i == pytest.approx(kin_21.X_t)
    r, t = tm_coefficients(kin_21)
    assert abs(r) <= 1e-15
    assert t == pytest.approx(1.0, abs=1e-15)


def test_build_mode_amplitudes(kin_21):
    raw = build_mode(kin_21, "TE")
    assert raw.incoming_amplitude == 1.0
    assert raw.r_coeff == pytest.approx(1 / 3) and raw.t_coeff == pytest.approx(4 / 3)
    norm = build_mode(kin_21, "TE", "normalized")
    assert norm.incoming_amplitude == pytest.approx(1 / SQ2)
    assert norm.r_coeff == raw.r_coeff and norm.t_coeff == raw.t_coeff
    right = make_kinematics(HalfSpaceMedium(SQ2), SQ3, SQ2, "R")
    assert build_mode(right, "TE", "normalized").incoming_amplitude == 1.0
    assert build_mode(kin_21, "TM", "normalized").incoming_amplitude == 1.0
    assert build_mode(kin_21, "TM").incoming_amplitude == 1.0


def test_legacy_rule_breaks_continuity(kin_21):
    legacy = build_mode(kin_21, "TE", rule=TransmissionRule.LEGACY)
    assert legacy.t_coeff == pytest.approx(2 / 3)
    assert legacy.t_coeff != 1 + legacy.r_coeff
    assert legacy_transmission(2.0, 1.0) == pytest.approx(2 / 3)


def test_polarization_vector():
    assert np.allclose(polarization_vector((0.0, 0.0)), (0, 1, 0))
    assert np.allclose(polarization_vector((2.0, 0.0)), (0, -1, 0))
    e = polarization_vector((0.3, -0.4))
    assert np.allclose(e, (-0.8, -0.6, 0))


def test_polarization_parse():
    assert Polarization.parse("te") is Polarization.TE
    assert Polarization.parse(2) is Polarization.TM
    assert Polarization.parse("p") is Polarization.TM
    assert NormalizationVariant.parse("Normalized") is NormalizationVariant.NORMALIZED
    with pytest.raises(ValueError):
        Polarization.parse("x")


mode_inputs = st.tuples(
    st.floats(1.0, 3.0),
    st.floats(0.2, 4.0),
    st.floats(0.0, 0.995),
    st.floats(0.0, 2 * math.pi),
    st.sampled_from(["L", "R"]),
    st.sampled_from(list(Polarization)),
    st.sampled_from(list(NormalizationVariant)),
)


def _mode(args):
    n, omega, frac, phi, side, pol, variant = args
    medium = HalfSpaceMedium(n)
    n_i = n if side == "L" else 1.0
    k = frac * n_i * omega
    kin = make_kinematics(medium, omega, (k * math.cos(phi), k * math.sin(phi)), side)
    return build_mode(kin, pol, variant)


@settings(max_examples=300, deadline=None)
@given(mode_inputs)
def test_continuity_relation_exact(args):
    mode = _mode(args)
    assert mode.t_coeff == 1 + mode.r_coeff


@settings(max_examples=300, deadline=None)
@given(mode_inputs)
def test_e_hat_unit_and_along_k_cross_normal(args):
    mode = _mode(args)
    e = mode.e_hat
    assert np.linalg.norm(e) == pytest.approx(1.0, abs=1e-15)
    k = np.array(mode.kin.k_incoming)
    cross = np.cross(k, (0.0, 0.0, 1.0))
    if np.linalg.norm(cross) > 1e-12:
        assert np.allclose(np.cross(cross, e), 0, atol=1e-12)
        assert np.dot(cross, e) > 0


@settings(max_examples=300, deadline=None)
@given(mode_inputs)
def test_energy_brackets_and_unimodularity(args):
    mode = _mode(args)
    kin = mode.kin
    a_r, a_t = te_coefficients(kin)
    b_r, b_t = tm_coefficients(kin)
    if kin.evanescent:
        assert abs(abs(a_r) - 1) <= 1e-14
        assert abs(abs(b_r) - 1) <= 1e-14
    else:
        te = 1 + abs(a_r) ** 2 + abs(a_t) ** 2 * kin.K_t.real / kin.K_i
        tm = 1 + abs(b_r) ** 2 + abs(b_t) ** 2 * kin.X_t.real / kin.X_i.real
        assert te == pytest.approx(2.0, abs=1e-13)
        assert tm == pytest.approx(2.0, abs=1e-13)


@settings(max_examples=200, deadline=None)
@given(mode_inputs)
def test_tm_is_te_function_of_reduced_components(args):
    kin = _mode(args).kin
    assert tm_coefficients(kin) == fresnel_pair(complex(kin.X_i), kin.X_t)
