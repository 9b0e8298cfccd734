"""Two half-space background and wave-vector kinematics.

Natural units throughout: c = mu0 = eps0 = 1, so the permittivity of a
half-space equals the square of its refractive index. The interface is the
plane z = 0; the point z = 0 itself belongs to the right half-space.
"""
from __future__ import annotations

import enum
import math
from dataclasses import dataclass
from typing import Sequence

from .errors import GrazingIncidence, MediumOrderError, NonPositiveFrequency


class Side(enum.Enum):
    """Half-space from which the incoming plane wave of a mode arrives."""

    LEFT = "L"
    RIGHT = "R"

    @property
    def sign(self) -> int:
        return 1 if self is Side.LEFT else -1

    @classmethod
    def parse(cls, value: "Side | str") -> "Side":
        if isinstance(value, Side):
            return value
        key = str(value).strip().upper()
        if key in ("L", "LEFT"):
            return cls.LEFT
        if key in ("R", "RIGHT"):
            return cls.RIGHT
        raise ValueError(f"unknown side {value!r}")


class Region(enum.Enum):
    """The two half-spaces, as integration domains along z."""

    NEGATIVE = -1  # z < 0
    POSITIVE = 1  # z >= 0

    @classmethod
    def of(cls, z: float) -> "Region":
        return cls.NEGATIVE if z < 0 else cls.POSITIVE


@dataclass(frozen=True)
class HalfSpaceMedium:
    """Refractive indices of the left (z < 0) and right (z >= 0) half-spaces.

    The denser medium sits on the left. Set ``generalized=True`` to allow
    ``n_left < n_right``; right-incident modes may then become evanescent.
    """

    n_left: float
    n_right: float = 1.0
    generalized: bool = False

    def __post_init__(self):
        if not (self.n_left > 0 and self.n_right > 0):
            raise MediumOrderError("refractive indices must be positive")
        if not (math.isfinite(self.n_left) and math.isfinite(self.n_right)):
            raise MediumOrderError("refractive indices must be finite")
        if self.n_left < self.n_right and not self.generalized:
            raise MediumOrderError(
                f"n_left={self.n_left} < n_right={self.n_right}; "
                "pass generalized=True to allow this"
            )

    def index(self, region: Region) -> float:
        return self.n_left if region is Region.NEGATIVE else self.n_right

    def indices(self, side: Side) -> tuple[float, float]:
        """Return ``(n_i, n_t)`` for a mode incoming from ``side``."""
        if side is Side.LEFT:
            return self.n_left, self.n_right
        return self.n_right, self.n_left


def refractive_index_at(medium: HalfSpaceMedium, x: Sequence[float]) -> float:
    return medium.n_left if x[2] < 0 else medium.n_right


def normal_component(n: float, omega: float, kpar2: float, sign: int) -> complex:
    """Normal wave-vector component on the branch that decays away from z = 0.

    ``sign`` is +1 for waves travelling towards +z (or decaying there) and -1
    otherwise.
    """
    # (n w - k)(n w + k) keeps precision near the critical angle
    kpar = math.sqrt(kpar2)
    k2 = (n * omega - kpar) * (n * omega + kpar)
    if k2 >= 0:
        return complex(sign * math.sqrt(k2), 0.0)
    return complex(0.0, sign * math.sqrt(-k2))


@dataclass(frozen=True)
class ModeKinematics:
    medium: HalfSpaceMedium
    omega: float
    k_parallel: tuple[float, float]
    side: Side
    K_i: float
    K_t: complex

    @property
    def n_i(self) -> float:
        return self.medium.indices(self.side)[0]

    @property
    def n_t(self) -> float:
        return self.medium.indices(self.side)[1]

    @property
    def eps_i(self) -> float:
        return self.n_i**2

    @property
    def eps_t(self) -> float:
        return self.n_t**2

    @property
    def K_r(self) -> float:
        return -self.K_i

    @property
    def X_i(self) -> complex:
        return complex(self.K_i / self.n_i**2)

    @property
    def X_t(self) -> complex:
        return self.K_t / self.n_t**2

    @property
    def kpar2(self) -> float:
        kx, ky = self.k_parallel
        return kx * kx + ky * ky

    @property
    def evanescent(self) -> bool:
        return self.K_t.imag != 0.0

    @property
    def incident_region(self) -> Region:
        return Region.NEGATIVE if self.side is Side.LEFT else Region.POSITIVE

    @property
    def transmitted_region(self) -> Region:
        return Region.POSITIVE if self.side is Side.LEFT else Region.NEGATIVE

    @property
    def k_incoming(self) -> tuple[float, float, float]:
        return (self.k_parallel[0], self.k_parallel[1], self.K_i)


def make_kinematics(
    medium: HalfSpaceMedium,
    omega: float,
    k_parallel: Sequence[float] | float,
    side: Side | str,
) -> ModeKinematics:
    """Solve the dispersion relations for a mode of frequency ``omega``.

    ``k_parallel`` is either an in-plane 2-vector or a scalar magnitude taken
    along x.
    """
    side = Side.parse(side)
    if not omega > 0:
        raise NonPositiveFrequency(f"omega must be positive, got {omega}")
    if isinstance(k_parallel, (int, float)):
        kpar = (float(k_parallel), 0.0)
    else:
        kx, ky = k_parallel
        kpar = (float(kx), float(ky))
    kpar2 = kpar[0] ** 2 + kpar[1] ** 2
    n_i, n_t = medium.indices(side)
    if math.sqrt(kpar2) >= n_i * omega:
        raise GrazingIncidence(
            f"|k_parallel|={math.sqrt(kpar2)} >= n_i*omega={n_i * omega}"
        )
    K_i = normal_component(n_i, omega, kpar2, side.sign).real
    K_t = normal_component(n_t, omega, kpar2, side.sign)
    return ModeKinematics(medium, float(omega), kpar, side, K_i, K_t)


def kinematics_from_normal(
    medium: HalfSpaceMedium,
    K_i: float,
    k_parallel: Sequence[float],
    side: Side | str,
) -> ModeKinematics:
    """Kinematics of the mode with incoming normal component ``K_i``.

    Used when a family of modes is parametrised by ``K_i`` at fixed k_parallel.
    """
    side = Side.parse(side)
    if K_i == 0 or (K_i > 0) != (side is Side.LEFT):
        raise GrazingIncidence(f"K_i={K_i} incompatible with side {side.value}")
    n_i, n_t = medium.indices(side)
    kx, ky = float(k_parallel[0]), float(k_parallel[1])
    kpar2 = kx * kx + ky * ky
    omega = math.sqrt(kpar2 + K_i * K_i) / n_i
    Kt2 = (n_t / n_i) ** 2 * (kpar2 + K_i * K_i) - kpar2
    if Kt2 >= 0:
        K_t = complex(side.sign * math.sqrt(Kt2), 0.0)
    else:
        K_t = complex(0.0, side.sign * math.sqrt(-Kt2))
    return ModeKinematics(medium, omega, (kx, ky), side, float(K_i), K_t)
