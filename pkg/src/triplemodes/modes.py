"""TE and TM triple modes: coefficients, polarisation and plane-wave content.

Each mode is a sum of three plane waves sharing the in-plane wave vector:
incoming and reflected in the incident half-space, transmitted in the other.
Field amplitudes follow two conventions:

* ``RAW``: unit incoming electric amplitude (TE) or unit incoming magnetic
  amplitude (TM).
* ``NORMALIZED``: as RAW but TE modes are divided by the incident index n_i,
  which makes the electric norm ``(2 pi)^3 delta`` for every mode.
"""
from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field
from functools import cached_property

import numpy as np

from .medium import ModeKinematics, Region, Side


class Polarization(enum.IntEnum):
    TE = 1
    TM = 2

    @classmethod
    def parse(cls, value: "Polarization | str | int") -> "Polarization":
        if isinstance(value, Polarization):
            return value
        if isinstance(value, int):
            return cls(value)
        key = str(value).strip().upper()
        if key in ("TE", "1", "S"):
            return cls.TE
        if key in ("TM", "2", "P"):
            return cls.TM
        raise ValueError(f"unknown polarization {value!r}")


class NormalizationVariant(enum.Enum):
    RAW = "raw"
    NORMALIZED = "normalized"

    @classmethod
    def parse(cls, value: "NormalizationVariant | str") -> "NormalizationVariant":
        if isinstance(value, NormalizationVariant):
            return value
        return cls(str(value).strip().lower())


class TransmissionRule(enum.Enum):
    """How the TE transmission coefficient is formed.

    ``CONTINUITY`` gives a_t = 2 K_i / (K_i + K_t) = 1 + a_r. ``LEGACY`` gives
    a_t = 2 K_t / (K_i + K_t); it violates continuity of tangential E and is
    kept only to demonstrate that failure.
    """

    CONTINUITY = "continuity"
    LEGACY = "legacy"


def fresnel_pair(incoming, transmitted):
    """Reflection and transmission coefficient for normal components.

    Works for any field type with + - / (floats, complex, numpy arrays,
    exact Gaussian rationals). The transmission coefficient is formed as
    ``1 + r`` so that tangential continuity holds bit for bit.
    """
    r = (incoming - transmitted) / (incoming + transmitted)
    return r, 1 + r


def legacy_transmission(incoming, transmitted):
    return 2 * transmitted / (incoming + transmitted)


def te_coefficients(kin: ModeKinematics) -> tuple[complex, complex]:
    """(a_r, a_t) for a TE mode."""
    return fresnel_pair(complex(kin.K_i), kin.K_t)


def tm_coefficients(kin: ModeKinematics) -> tuple[complex, complex]:
    """(b_r, b_t) for a TM mode, the TE formula applied to X = K / n^2."""
    return fresnel_pair(kin.X_i, kin.X_t)


def polarization_vector(k_parallel: tuple[float, float]) -> np.ndarray:
    """Unit vector along k_i x e_3, or e_y at normal incidence."""
    kx, ky = k_parallel
    big = max(abs(kx), abs(ky))
    if big == 0.0:
        return np.array([0.0, 1.0, 0.0])
    # rescale first so subnormal inputs keep full precision
    kx, ky = kx / big, ky / big
    norm = math.hypot(kx, ky)
    return np.array([ky / norm, -kx / norm, 0.0])


@dataclass(frozen=True)
class PlaneWave:
    """One plane-wave component ``amp * exp(i (k_par . x_par + K z))``."""

    region: Region
    K: complex
    E: np.ndarray
    B: np.ndarray

    def wavevector(self, k_parallel) -> np.ndarray:
        return np.array([k_parallel[0], k_parallel[1], self.K], dtype=complex)


@dataclass(frozen=True)
class TripleMode:
    kin: ModeKinematics
    pol: Polarization
    variant: NormalizationVariant
    e_hat: np.ndarray = field(repr=False)
    r_coeff: complex
    t_coeff: complex
    incoming_amplitude: float
    rule: TransmissionRule = TransmissionRule.CONTINUITY

    @property
    def side(self) -> Side:
        return self.kin.side

    @property
    def omega(self) -> float:
        return self.kin.omega

    @property
    def k_parallel(self) -> tuple[float, float]:
        return self.kin.k_parallel

    @cached_property
    def components(self) -> tuple[PlaneWave, PlaneWave, PlaneWave]:
        """Incoming, reflected and transmitted plane waves, in that order."""
        kin = self.kin
        medium = kin.medium
        kx, ky = kin.k_parallel
        omega = kin.omega
        amp = self.incoming_amplitude
        coeffs = (1.0, self.r_coeff, self.t_coeff)
        normals = (complex(kin.K_i), complex(-kin.K_i), kin.K_t)
        regions = (kin.incident_region, kin.incident_region, kin.transmitted_region)
        waves = []
        for c, K, region in zip(coeffs, normals, regions):
            k = np.array([kx, ky, K], dtype=complex)
            primary = amp * c * self.e_hat.astype(complex)
            if self.pol is Polarization.TE:
                E = primary
                B = np.cross(k, E) / omega
            else:
                B = primary
                E = -np.cross(k, B) / (omega * medium.index(region) ** 2)
            waves.append(PlaneWave(region, K, E, B))
        return tuple(waves)

    def region_components(self, region: Region) -> list[PlaneWave]:
        return [w for w in self.components if w.region is region]


def build_mode(
    kin: ModeKinematics,
    pol: Polarization | str = Polarization.TE,
    variant: NormalizationVariant | str = NormalizationVariant.RAW,
    rule: TransmissionRule = TransmissionRule.CONTINUITY,
) -> TripleMode:
    pol = Polarization.parse(pol)
    variant = NormalizationVariant.parse(variant)
    if pol is Polarization.TE:
        r, t = te_coefficients(kin)
        if rule is TransmissionRule.LEGACY:
            t = legacy_transmission(complex(kin.K_i), kin.K_t)
        amplitude = 1.0 / kin.n_i if variant is NormalizationVariant.NORMALIZED else 1.0
    else:
        r, t = tm_coefficients(kin)
        amplitude = 1.0
    return TripleMode(
        kin=kin,
        pol=pol,
        variant=variant,
        e_hat=polarization_vector(kin.k_parallel),
        r_coeff=complex(r),
        t_coeff=complex(t),
        incoming_amplitude=amplitude,
        rule=rule,
    )
