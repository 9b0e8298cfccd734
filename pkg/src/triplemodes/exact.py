"""Exact arithmetic over the Gaussian rationals Q(i) and rational kinematics.

Identity checks are written generically over anything supporting + - * /
and ``conjugate()``. Feeding them :class:`GaussianRational` values at the
points produced by :func:`rational_points` turns a floating residual into an
exact zero test.
"""
from __future__ import annotations

import itertools
from collections import defaultdict
from dataclasses import dataclass
from fractions import Fraction
from numbers import Rational


class GaussianRational:
    """Complex number with :class:`fractions.Fraction` parts."""

    __slots__ = ("re", "im")

    def __init__(self, re=0, im=0):
        self.re = Fraction(re)
        self.im = Fraction(im)

    @staticmethod
    def _coerce(other):
        if isinstance(other, GaussianRational):
            return other
        if isinstance(other, (int, Rational)):
            return GaussianRational(other, 0)
        return NotImplemented

    @property
    def real(self) -> Fraction:
        return self.re

    @property
    def imag(self) -> Fraction:
        return self.im

    def conjugate(self) -> "GaussianRational":
        return GaussianRational(self.re, -self.im)

    def abs2(self) -> Fraction:
        return self.re * self.re + self.im * self.im

    def __add__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return GaussianRational(self.re + other.re, self.im + other.im)

    __radd__ = __add__

    def __neg__(self):
        return GaussianRational(-self.re, -self.im)

    def __pos__(self):
        return self

    def __sub__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return GaussianRational(self.re - other.re, self.im - other.im)

    def __rsub__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return other - self

    def __mul__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return GaussianRational(
            self.re * other.re - self.im * other.im,
            self.re * other.im + self.im * other.re,
        )

    __rmul__ = __mul__

    def __truediv__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        d = other.abs2()
        if d == 0:
            raise ZeroDivisionError("division by zero in Q(i)")
        num = self * other.conjugate()
        return GaussianRational(num.re / d, num.im / d)

    def __rtruediv__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return other / self

    def __pow__(self, n: int):
        if not isinstance(n, int):
            return NotImplemented
        if n < 0:
            return 1 / (self ** (-n))
        out = GaussianRational(1)
        for _ in range(n):
            out = out * self
        return out

    def __eq__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return self.re == other.re and self.im == other.im

    def __hash__(self):
        return hash((self.re, self.im))

    def __complex__(self):
        return complex(float(self.re), float(self.im))

    def __repr__(self):
        return f"GaussianRational({self.re}, {self.im})"

    def is_zero(self) -> bool:
        return self.re == 0 and self.im == 0


@dataclass(frozen=True)
class ExactKinematics:
    """Kinematics with every quantity in Q(i); ``sign`` is +1 left, -1 right."""

    K_i: GaussianRational
    K_t: GaussianRational
    eps_i: Fraction
    eps_t: Fraction
    kpar2: Fraction
    omega2: Fraction
    sign: int

    @property
    def X_i(self) -> GaussianRational:
        return self.K_i / self.eps_i

    @property
    def X_t(self) -> GaussianRational:
        return self.K_t / self.eps_t

    @property
    def evanescent(self) -> bool:
        return self.K_t.im != 0

    def dispersion_residuals(self) -> tuple[GaussianRational, GaussianRational]:
        return (
            self.kpar2 + self.K_i * self.K_i - self.eps_i * self.omega2,
            self.kpar2 + self.K_t * self.K_t - self.eps_t * self.omega2,
        )

    def mirrored(self) -> "ExactKinematics":
        """Right-incident travelling mode sharing this point's wave numbers.

        The incoming wave lives in the rarer medium, so the roles of the two
        normal components swap and both change sign.
        """
        if self.evanescent or self.sign != 1:
            raise ValueError("only travelling left points can be mirrored")
        return ExactKinematics(
            K_i=-self.K_t, K_t=-self.K_i, eps_i=self.eps_t, eps_t=self.eps_i,
            kpar2=self.kpar2, omega2=self.omega2, sign=-1,
        )


DEFAULT_PERMITTIVITIES = (Fraction(2), Fraction(3), Fraction(9, 4), Fraction(5, 2), Fraction(4))


def rational_points(
    max_component: int = 12,
    permittivities=DEFAULT_PERMITTIVITIES,
    evanescent: bool | None = None,
) -> list[ExactKinematics]:
    """Left-incident points with integer |K_i|, |K_t| and rational omega^2, k^2.

    The right half-space has permittivity 1. ``evanescent`` filters the
    transmitted wave type; ``None`` keeps both.
    """
    points = []
    for eps in permittivities:
        for a in range(1, max_component + 1):
            for b in range(0, max_component + 1):
                for imag in (False, True):
                    if b == 0 and imag:
                        continue
                    if evanescent is not None and imag != evanescent:
                        continue
                    Kt2 = -b * b if imag else b * b
                    omega2 = Fraction(a * a - Kt2) / (eps - 1)
                    kpar2 = omega2 - Kt2
                    # k^2 = 0 is the normal-incidence limit, allowed; b = 0 is grazing transmission
                    if omega2 <= 0 or kpar2 < 0 or b == 0:
                        continue
                    K_t = GaussianRational(0, b) if imag else GaussianRational(b)
                    points.append(ExactKinematics(
                        K_i=GaussianRational(a), K_t=K_t, eps_i=Fraction(eps),
                        eps_t=Fraction(1), kpar2=kpar2, omega2=omega2, sign=1,
                    ))
    return points


def rational_pairs(points: list[ExactKinematics]) -> list[tuple[ExactKinematics, ExactKinematics]]:
    """Distinct-frequency pairs of points sharing permittivity and k^2."""
    groups: dict[tuple, list[ExactKinematics]] = defaultdict(list)
    for pt in points:
        groups[(pt.eps_i, pt.kpar2)].append(pt)
    pairs = []
    for key in sorted(groups):
        for p, q in itertools.permutations(groups[key], 2):
            if p.omega2 != q.omega2:
                pairs.append((p, q))
    return pairs
