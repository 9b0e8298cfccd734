import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from triplemodes.errors import EmptyGrid
from triplemodes.fields import (
    Axis,
    GridSpec,
    boundary_continuity_residual,
    eval_electric,
    eval_magnetic,
    sample_grid,
)
from triplemodes.medium import HalfSpaceMedium, make_kinematics
from triplemodes.modes import Polarization, TransmissionRule, build_mode

SQ2 = math.sqrt(2.0)
SQ3 = math.sqrt(3.0)
BELOW = (0.0, 0.0, -1e-300)
ORIGIN = (0.0, 0.0, 0.0)


def _mode21(pol="TE", rule=TransmissionRule.CONTINUITY):
    kin = make_kinematics(HalfSpaceMedium(SQ2), SQ3, SQ2, "L")
    return build_mode(kin, pol, rule=rule)


def _evanescent(pol="TE"):
    # K_i = 1, K_t = i
    return build_mode(make_kinematics(HalfSpaceMedium(SQ3), 1.0, SQ2, "L"), pol)


def test_te_tangential_field_matches_across_interface():
    mode = _mode21()
    below = eval_electric(mode, BELOW)
    at = eval_electric(mode, ORIGIN)
    assert np.linalg.norm(below[:2]) == pytest.approx(4 / 3, abs=1e-14)
    assert np.linalg.norm(at[:2]) == pytest.approx(4 / 3, abs=1e-14)


def test_te_evanescent_decay_profile():
    mode = _evanescent()
    for z in (0.1, 0.5, 1.0, 3.0):
        assert np.linalg.norm(eval_electric(mode, (0.0, 0.0, z))) == pytest.approx(
            abs(mode.t_coeff) * math.exp(-z), rel=1e-13)


def test_tm_evanescent_magnetic_decay_profile():
    mode = _evanescent("TM")
    kappa = mode.kin.K_t.imag
    for z in (0.2, 2.0):
        assert np.linalg.norm(eval_magnetic(mode, (0.3, 0.0, z))) == pytest.approx(
            abs(mode.t_coeff) * math.exp(-kappa * z), rel=1e-13)


def test_matched_media_plane_wave_magnetic_field():
    mode = build_mode(make_kinematics(HalfSpaceMedium(1.0), 1.0, (0.0, 0.0), "L"), "TE")
    for z in (-1.0, 0.0, 2.5):
        B = eval_magnetic(mode, (0.0, 0.0, z))
        assert np.allclose(B, np.array([-1, 0, 0]) * np.exp(1j * z), atol=1e-15)


def test_tm_magnetic_field_in_incident_region():
    mode = _mode21("TM")
    kx, ky = mode.k_parallel
    x = np.array([0.4, -0.2, -0.7])
    phase_i = np.exp(1j * (kx * x[0] + ky * x[1] + mode.kin.K_i * x[2]))
    phase_r = np.exp(1j * (kx * x[0] + ky * x[1] - mode.kin.K_i * x[2]))
    expected = mode.e_hat * (phase_i + mode.r_coeff * phase_r)
    assert np.allclose(eval_magnetic(mode, x), expected, atol=1e-14)


def test_legacy_transmission_jump():
    res = boundary_continuity_residual(_mode21(rule=TransmissionRule.LEGACY))
    assert res.d_E_tan == pytest.approx(2 / 3, abs=1e-14)


def test_library_modes_continuous():
    for pol in ("TE", "TM"):
        assert boundary_continuity_residual(_mode21(pol)).max() <= 1e-13
        assert boundary_continuity_residual(_evanescent(pol)).max() <= 1e-13


def test_continuity_over_thousand_random_modes():
    rng = np.random.default_rng(7)
    worst = 0.0
    for _ in range(1000):
        n = rng.uniform(1.0, 3.0)
        side = "L" if rng.random() < 0.5 else "R"
        omega = rng.uniform(0.2, 4.0)
        n_i = n if side == "L" else 1.0
        k = rng.uniform(0, 0.99) * n_i * omega
        phi = rng.uniform(0, 2 * math.pi)
        kin = make_kinematics(HalfSpaceMedium(n), omega, (k * math.cos(phi), k * math.sin(phi)), side)
        for pol in Polarization:
            mode = build_mode(kin, pol)
            worst = max(worst, boundary_continuity_residual(mode).max())
    assert worst <= 1e-13


def test_sample_grid_single_point():
    samples = sample_grid(_mode21(), GridSpec())
    assert len(samples) == 1
    assert np.allclose(samples[0].x, 0)


def test_sample_grid_order_and_count():
    grid = GridSpec(x=Axis(-1, 1, 101), z=Axis(-1, 1, 101))
    samples = sample_grid(_mode21(), grid)
    assert len(samples) == 10201
    assert tuple(samples[0].x) == (-1, 0, -1)
    assert tuple(samples[1].x) == pytest.approx((-1, 0, -0.98))
    assert tuple(samples[101].x) == pytest.approx((-0.98, 0, -1))


def test_sample_grid_evanescent_line_decays():
    samples = sample_grid(_evanescent(), GridSpec(z=Axis(0.0, 5.0, 26)))
    mags = [np.linalg.norm(s.E) for s in samples]
    assert all(b < a for a, b in zip(mags, mags[1:]))


def test_empty_grid_rejected():
    with pytest.raises(EmptyGrid):
        sample_grid(_mode21(), GridSpec(x=Axis(0, 1, 0)))
    with pytest.raises(EmptyGrid):
        sample_grid(_mode21(), GridSpec(x=Axis(0, math.inf, 3)))


mode_inputs = st.tuples(
    st.floats(1.0, 3.0),
    st.floats(0.2, 4.0),
    st.floats(0.0, 0.99),
    st.floats(0.0, 2 * math.pi),
    st.sampled_from(["L", "R"]),
    st.sampled_from(list(Polarization)),
)


def _random_mode(args):
    n, omega, frac, phi, side, pol = args
    n_i = n if side == "L" else 1.0
    k = frac * n_i * omega
    kin = make_kinematics(HalfSpaceMedium(n), omega, (k * math.cos(phi), k * math.sin(phi)), side)
    return build_mode(kin, pol)


@settings(max_examples=300, deadline=None)
@given(mode_inputs)
def test_plane_wave_components_are_maxwell_waves(args):
    mode = _random_mode(args)
    omega = mode.omega
    for wave in mode.components:
        k = wave.wavevector(mode.k_parallel)
        n = mode.kin.medium.index(wave.region)
        # Helmholtz: k.k = n^2 omega^2 (non-conjugated square)
        assert abs(np.sum(k * k) - n**2 * omega**2) <= 16 * np.finfo(float).eps * n**2 * omega**2
        scale = max(np.linalg.norm(wave.E), np.linalg.norm(wave.B), 1e-300)
        kn = np.linalg.norm(k)
        assert abs(np.sum(k * wave.E)) <= 1e-13 * kn * scale
        assert abs(np.sum(k * wave.B)) <= 1e-13 * kn * scale
        faraday = np.cross(k, wave.E) / omega - wave.B
        assert np.linalg.norm(faraday) <= 1e-12 * max(np.linalg.norm(wave.B), 1e-300)


@settings(max_examples=200, deadline=None)
@given(mode_inputs)
def test_continuity_property(args):
    assert boundary_continuity_residual(_random_mode(args)).max() <= 1e-13
