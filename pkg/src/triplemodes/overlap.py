"""Regularised inner products of triple modes.

Every overlap integral of two modes factorises into an in-plane delta
function times a sum over plane-wave pairs of closed-form damped half-line
integrals in z::

    int_{-inf}^0 e^{i rho z} e^{eps z} dz = -i / (rho - i eps)
    int_0^{inf}  e^{i rho z} e^{-eps z} dz =  i / (rho + i eps)

As eps -> 0 a term with rho = 0 becomes a one-dimensional delta function;
all other terms form the principal part. Numerical quadrature is used only to
smear those deltas against a test function and in the finite-box oracle.
"""
from __future__ import annotations

import enum
import math
import warnings
from dataclasses import dataclass, field, replace
from typing import Sequence

import numpy as np
from scipy import integrate

from .errors import DivergentIntegral, PolarizationMismatch, QuadratureFailure, TailTooLarge
from .expansion import Box, PacketSpectrum, integrate_on_box, tail_bound
from .medium import Region, kinematics_from_normal
from .modes import Polarization, TripleMode, build_mode

TWO_PI = 2.0 * math.pi


class HalfLine(enum.Enum):
    NEGATIVE = "negative"
    POSITIVE = "positive"

    @classmethod
    def of(cls, region: Region) -> "HalfLine":
        return cls.NEGATIVE if region is Region.NEGATIVE else cls.POSITIVE


class Form(enum.Enum):
    """Bilinear forms of two mode fields."""

    ELECTRIC = "electric"  # n^2 E* . E'
    MAGNETIC = "magnetic"  # B* . B'
    MIXED = "mixed"  # n^2 E* . E' - B* . B'


class MixedForm(enum.Enum):
    CONJUGATE_MINUS = "conjugate-minus"  # n^2 E*.E' - B*.B' at k_par' = k_par
    PLAIN_PLUS = "plain-plus"  # n^2 E.E' + B.B' at k_par' = -k_par


class Family(enum.Enum):
    """Mode family and bilinear form for delta smearing."""

    TE_E = "te-e"
    TM_B = "tm-b"
    TE_B = "te-b"
    TM_E = "tm-e"
    TE_MIXED = "te-mixed"
    TM_MIXED = "tm-mixed"

    @property
    def polarization(self) -> Polarization:
        return Polarization.TE if self.value.startswith("te") else Polarization.TM

    @property
    def form(self) -> Form:
        suffix = self.value.split("-")[1]
        return {"e": Form.ELECTRIC, "b": Form.MAGNETIC, "mixed": Form.MIXED}[suffix]


@dataclass(frozen=True)
class RegularizationParams:
    """Damping sequence, extrapolation and smearing settings.

    ``smear_sigma=None`` means ``smear_rel * |K_i|`` of the mode being
    smeared. Smearing uses only the dampings with eps <= sigma * smear_eps_ratio.
    """

    epsilons: tuple[float, ...] = (1e-2, 1e-3, 1e-4, 1e-5)
    extrapolation_order: int = 2
    smear_sigma: float | None = None
    smear_rel: float = 1e-2
    quad_tol: float = 1e-9
    quad_limit: int = 1000
    smear_halfwidth: float = 8.0
    smear_eps_ratio: float = 0.1

    def __post_init__(self):
        eps = tuple(float(e) for e in self.epsilons)
        object.__setattr__(self, "epsilons", eps)
        if not eps or any(e <= 0 or not math.isfinite(e) for e in eps):
            raise ValueError("epsilons must be positive and finite")
        if any(b >= a for a, b in zip(eps, eps[1:])):
            raise ValueError("epsilons must be strictly decreasing")
        if self.extrapolation_order < 0 or self.extrapolation_order + 1 > len(eps):
            raise ValueError("extrapolation_order needs order+1 epsilons")
        if self.smear_sigma is not None and not self.smear_sigma > 0:
            raise ValueError("smear_sigma must be positive")
        if not (self.quad_tol > 0 and self.smear_rel > 0):
            raise ValueError("quad_tol and smear_rel must be positive")

    def sigma_for(self, K_i: float) -> float:
        return self.smear_sigma if self.smear_sigma is not None else self.smear_rel * abs(K_i)

    def smearing_epsilons(self, sigma: float) -> tuple[float, ...]:
        eps = tuple(e for e in self.epsilons if e <= sigma * self.smear_eps_ratio)
        if len(eps) < 2:
            raise ValueError(
                f"need at least two epsilons <= {sigma * self.smear_eps_ratio:g} for smearing"
            )
        return eps


@dataclass(frozen=True)
class DeltaTerm:
    """Delta function ``weight * delta(K_i' - location)`` in the primed K_i."""

    location: float
    weight: complex


@dataclass(frozen=True)
class ParallelDelta:
    """In-plane factor (2 pi)^2 delta^2(k_par' -/+ k_par)."""

    present: bool
    argument: tuple[float, float]
    plus: bool = False


@dataclass
class OverlapResult:
    form: str
    parallel_delta: ParallelDelta
    principal_value: complex
    delta_weights: list[DeltaTerm] = field(default_factory=list)
    damped_values: list[tuple[float, complex]] = field(default_factory=list)
    delta_candidates: list[DeltaTerm] = field(default_factory=list)
    smeared_weight: float | None = None

    def eps_exponent(self) -> float:
        return eps_exponent(self.damped_values)

    def to_record(self) -> dict:
        return {
            "form": self.form,
            "parallel_delta": {
                "present": self.parallel_delta.present,
                "argument": list(self.parallel_delta.argument),
                "plus": self.parallel_delta.plus,
            },
            "principal_value": _cplx(self.principal_value),
            "delta_weights": [{"location": d.location, "weight": _cplx(d.weight)} for d in self.delta_weights],
            "delta_candidates": [{"location": d.location, "weight": _cplx(d.weight)} for d in self.delta_candidates],
            "epsilons": [e for e, _ in self.damped_values],
            "damped_values": [_cplx(v) for _, v in self.damped_values],
            "smeared_weight": self.smeared_weight,
        }


def _cplx(z) -> list[float]:
    z = complex(z)
    return [z.real, z.imag]


# ---------------------------------------------------------------- primitives


def damped_half_line(rho, side: HalfLine | str, eps: float):
    """Closed form of the damped integral of e^{i rho z} over a half-line."""
    side = HalfLine(side)
    rho = np.asarray(rho, dtype=complex) if np.ndim(rho) else complex(rho)
    if eps < 0:
        raise DivergentIntegral("eps must be non-negative")
    if side is HalfLine.NEGATIVE:
        if np.any(np.imag(rho) >= eps):
            raise DivergentIntegral("negative half-line needs Im(rho) < eps")
        return -1j / (rho - 1j * eps)
    if np.any(np.imag(rho) <= -eps):
        raise DivergentIntegral("positive half-line needs Im(rho) > -eps")
    return 1j / (rho + 1j * eps)


def richardson(epsilons: Sequence[float], values: Sequence[complex], order: int = 2) -> complex:
    """Polynomial extrapolation to eps = 0 from the ``order + 1`` smallest eps (Neville)."""
    pairs = sorted(zip(epsilons, values), key=lambda p: p[0])[: order + 1]
    x = [p[0] for p in pairs]
    P = [complex(p[1]) for p in pairs]
    n = len(P)
    for m in range(1, n):
        for i in range(n - m):
            P[i] = (x[i + m] * P[i] - x[i] * P[i + 1]) / (x[i + m] - x[i])
    return P[0]


def eps_exponent(damped_values: Sequence[tuple[float, complex]]) -> float:
    """Least-squares slope of log|I| against log eps; +inf for I identically 0."""
    pts = [(e, abs(v)) for e, v in damped_values if v != 0]
    if len(pts) < 2:
        return math.inf
    x = np.log([e for e, _ in pts])
    y = np.log([v for _, v in pts])
    return float(np.polyfit(x, y, 1)[0])


# ---------------------------------------------------------------- z reduction


@dataclass(frozen=True)
class PairTerm:
    region: Region
    rho: complex
    coeff: complex
    # |dK'/dK_i'| of the primed component, for delta conversion
    primed_slope: float


def _component_slopes(mode: TripleMode) -> tuple[float, float, float]:
    kin = mode.kin
    if kin.evanescent:
        trans = math.nan
    else:
        trans = (kin.eps_t / kin.eps_i) * abs(kin.K_i) / abs(kin.K_t.real)
    return (1.0, 1.0, trans)


def _field_pair(form_field: str, wave) -> np.ndarray:
    return wave.E if form_field == "E" else wave.B


def pair_terms(
    mode: TripleMode,
    mode2: TripleMode,
    field_name: str,
    weighted: bool,
    conjugate: bool = True,
    product: str = "dot",
) -> list[PairTerm]:
    """Plane-wave pair coefficients of ``w(z) F* . G'`` (or the z-cross product).

    ``field_name`` is "E", "B", or "EB" (first field E, second B; used for the
    cross-product profile).
    """
    medium = mode.kin.medium
    first, second = (field_name[0], field_name[-1])
    slopes = _component_slopes(mode2)
    terms = []
    for region in (Region.NEGATIVE, Region.POSITIVE):
        w = medium.index(region) ** 2 if weighted else 1.0
        for wave in mode.components:
            if wave.region is not region:
                continue
            a = _field_pair(first, wave)
            if conjugate:
                a = np.conj(a)
            K = np.conj(wave.K) if conjugate else wave.K
            for idx, wave2 in enumerate(mode2.components):
                if wave2.region is not region:
                    continue
                b = _field_pair(second, wave2)
                if product == "dot":
                    c = a[0] * b[0] + a[1] * b[1] + a[2] * b[2]
                else:
                    c = a[0] * b[1] - a[1] * b[0]
                rho = wave2.K - K if conjugate else wave2.K + K
                terms.append(PairTerm(region, complex(rho), complex(w * c), slopes[idx]))
    return terms


def _is_resonant(term: PairTerm, scale: float) -> bool:
    return abs(term.rho) <= 64 * np.finfo(float).eps * scale


def damped_sum(terms: Sequence[PairTerm], eps: float) -> complex:
    total = 0j
    for t in terms:
        total += t.coeff * damped_half_line(t.rho, HalfLine.of(t.region), eps)
    return total


def principal_limit(terms: Sequence[PairTerm]) -> complex:
    """eps -> 0 limit of a damped sum without coincident pairs."""
    total = 0j
    for t in terms:
        if t.rho == 0:
            raise DivergentIntegral("coincident pair has no principal limit")
        total += t.coeff * (-1j if t.region is Region.NEGATIVE else 1j) / t.rho
    return total


def _form_terms(mode, mode2, form: Form, conjugate: bool = True) -> list[PairTerm]:
    if form is Form.ELECTRIC:
        return pair_terms(mode, mode2, "E", True, conjugate)
    if form is Form.MAGNETIC:
        return pair_terms(mode, mode2, "B", False, conjugate)
    e_terms = pair_terms(mode, mode2, "E", True, conjugate)
    b_terms = pair_terms(mode, mode2, "B", False, conjugate)
    sign = -1.0 if conjugate else 1.0
    return e_terms + [replace(t, coeff=sign * t.coeff) for t in b_terms]


def _same_kpar(mode, mode2, plus: bool) -> bool:
    k1 = np.asarray(mode.k_parallel)
    k2 = np.asarray(mode2.k_parallel)
    return bool(np.all(k2 == (-k1 if plus else k1)))


def _zero_result(form: str, mode, mode2, plus: bool = False) -> OverlapResult:
    k1 = np.asarray(mode.k_parallel)
    k2 = np.asarray(mode2.k_parallel)
    arg = k2 + k1 if plus else k2 - k1
    return OverlapResult(form, ParallelDelta(False, (float(arg[0]), float(arg[1])), plus), 0j)


def _neighbour(mode: TripleMode, K_i: float) -> TripleMode:
    kin = kinematics_from_normal(mode.kin.medium, K_i, mode.k_parallel, mode.side)
    return build_mode(kin, mode.pol, mode.variant, mode.rule)


def overlap(
    mode: TripleMode,
    mode2: TripleMode,
    form: Form | str = Form.ELECTRIC,
    params: RegularizationParams | None = None,
) -> OverlapResult:
    """Overlap integral of two modes in the chosen bilinear form.

    The result is the coefficient of (2 pi)^2 delta^2(k_par' - k_par).
    Coincident plane-wave pairs (rho = 0) are reported as delta candidates;
    candidates sharing a location are summed, and those whose weights cancel
    are dropped from ``delta_weights``. The principal value at a coincidence
    is the mean of the exact principal limits at K_i' = K_i (1 +/- 1e-3).
    """
    params = params or RegularizationParams()
    form = Form(form)
    if mode.kin.medium != mode2.kin.medium:
        raise ValueError("modes belong to different media")
    if not _same_kpar(mode, mode2, plus=False):
        return _zero_result(form.value, mode, mode2)
    terms = _form_terms(mode, mode2, form)
    scale = max(abs(mode.kin.K_i), abs(mode2.kin.K_i))
    resonant = [t for t in terms if _is_resonant(t, scale)]
    regular = [t for t in terms if not _is_resonant(t, scale)]
    damped = [(e, damped_sum(terms, e)) for e in params.epsilons]
    result = OverlapResult(form.value, ParallelDelta(True, (0.0, 0.0)), 0j, damped_values=damped)
    if not resonant:
        values = [damped_sum(regular, e) for e in params.epsilons]
        result.principal_value = richardson(params.epsilons, values, params.extrapolation_order)
        return result
    # eps -> 0: both half-lines give pi * delta(rho); convert to the primed K_i
    location = float(mode2.kin.K_i)
    candidates = [DeltaTerm(location, math.pi * t.coeff / t.primed_slope) for t in resonant]
    result.delta_candidates = candidates
    total = sum(d.weight for d in candidates)
    size = sum(abs(d.weight) for d in candidates)
    if abs(total) > 1e-12 * size:
        result.delta_weights = [DeltaTerm(location, complex(total))]
    h = 1e-3 * abs(location)
    side_values = [principal_limit(_form_terms(mode, _neighbour(mode2, location + d), form))
                   for d in (-h, h)]
    result.principal_value = 0.5 * (side_values[0] + side_values[1])
    return result


def overlap_te_electric(mode, mode2, params: RegularizationParams | None = None) -> OverlapResult:
    if mode.pol is not Polarization.TE or mode2.pol is not Polarization.TE:
        raise PolarizationMismatch("electric TE overlap needs two TE modes; use overlap_cross")
    return overlap(mode, mode2, Form.ELECTRIC, params)


def overlap_tm_magnetic(mode, mode2, params: RegularizationParams | None = None) -> OverlapResult:
    if mode.pol is not Polarization.TM or mode2.pol is not Polarization.TM:
        raise PolarizationMismatch("magnetic TM overlap needs two TM modes; use overlap_cross")
    return overlap(mode, mode2, Form.MAGNETIC, params)


def cross_pointwise_residual(mode_te: TripleMode, mode_tm: TripleMode, which: Form) -> float:
    """Largest |F_TE . F_TM| over all plane-wave pairs, relative to |F||F'|."""
    worst = 0.0
    for w1 in mode_te.components:
        for w2 in mode_tm.components:
            a = w1.E if which is Form.ELECTRIC else w1.B
            b = w2.E if which is Form.ELECTRIC else w2.B
            norm = np.linalg.norm(a) * np.linalg.norm(b)
            if norm:
                worst = max(worst, abs(np.vdot(a, b)) / norm)
    return worst


def overlap_cross(
    mode_te: TripleMode,
    mode_tm: TripleMode,
    which: Form | str = Form.ELECTRIC,
    params: RegularizationParams | None = None,
    tol: float = 1e-15,
) -> OverlapResult:
    """TE against TM: zero, after checking the field directions are orthogonal."""
    params = params or RegularizationParams()
    which = Form(which)
    if which is Form.MIXED:
        raise ValueError("overlap_cross takes the electric or magnetic form")
    if {mode_te.pol, mode_tm.pol} != {Polarization.TE, Polarization.TM}:
        raise PolarizationMismatch("overlap_cross needs one TE and one TM mode")
    if mode_te.pol is Polarization.TM:
        mode_te, mode_tm = mode_tm, mode_te
    if not _same_kpar(mode_te, mode_tm, plus=False):
        return _zero_result(which.value, mode_te, mode_tm)
    residual = cross_pointwise_residual(mode_te, mode_tm, which)
    if residual > tol:
        raise ArithmeticError(f"TE and TM fields not orthogonal: {residual:.3e}")
    return OverlapResult(
        which.value, ParallelDelta(True, (0.0, 0.0)), 0j,
        damped_values=[(e, 0j) for e in params.epsilons],
    )


# ---------------------------------------------------------------- delta weights


def expected_delta_weight(mode: TripleMode, family: Family | str) -> float:
    """Closed-form delta weight of a mode's self-overlap in K_i measure."""
    family = Family(family)
    if family.form is Form.MIXED:
        return 0.0
    if mode.pol is Polarization.TE:
        return TWO_PI * mode.kin.eps_i * mode.incoming_amplitude**2
    return TWO_PI * mode.incoming_amplitude**2


def analytic_delta_weight(mode: TripleMode, form: Form | str = Form.ELECTRIC) -> complex:
    """Delta weight of the self-overlap from the coincident plane-wave pairs."""
    res = overlap(mode, mode, Form(form), RegularizationParams())
    return sum((d.weight for d in res.delta_candidates), 0j)


def _smear_integrand(mode: TripleMode, form: Form):
    cache: dict[float, tuple[np.ndarray, np.ndarray, np.ndarray]] = {}

    def terms_at(x: float):
        hit = cache.get(x)
        if hit is None:
            terms = _form_terms(mode, _neighbour(mode, x), form)
            hit = (
                np.array([t.rho for t in terms]),
                np.array([t.coeff for t in terms]),
                np.array([t.region is Region.NEGATIVE for t in terms]),
            )
            cache[x] = hit
        return hit

    def value(x: float, eps: float) -> complex:
        rho, coeff, neg = terms_at(x)
        damped = np.where(neg, -1j / (rho - 1j * eps), 1j / (rho + 1j * eps))
        return complex(np.sum(coeff * damped))

    return value


def smeared_delta_weight(
    mode: TripleMode,
    params: RegularizationParams | None = None,
    family: Family | str = Family.TE_E,
    return_details: bool = False,
):
    """Recover the delta weight at K_i' = K_i by Gaussian smearing.

    Integrates I(K_i'; eps) against exp(-(K_i' - K_i)^2 / (2 sigma^2)) with
    adaptive quadrature, extrapolates eps -> 0 and returns the real part
    (the test function is 1 at the centre).
    """
    params = params or RegularizationParams()
    family = Family(family)
    if mode.pol is not family.polarization:
        raise PolarizationMismatch(f"family {family.value} needs a {family.polarization.name} mode")
    K_i = mode.kin.K_i
    sigma = params.sigma_for(K_i)
    epsilons = params.smearing_epsilons(sigma)
    integrand = _smear_integrand(mode, family.form)
    lo, hi = K_i - params.smear_halfwidth * sigma, K_i + params.smear_halfwidth * sigma
    if (lo > 0) != (K_i > 0) or (hi > 0) != (K_i > 0):
        raise ValueError("smearing window crosses grazing incidence")

    def phi(x):
        return math.exp(-0.5 * ((x - K_i) / sigma) ** 2)

    kin = mode.kin
    slope = 1.0
    if abs(kin.K_t) > 0:
        slope = max(slope, (kin.eps_t / kin.eps_i) * abs(K_i) / abs(kin.K_t))

    values = []
    for eps in epsilons:
        # breakpoints resolve the Lorentzian peaks of width eps / slope
        points = sorted({K_i} | {K_i + sgn * m * eps / s for sgn in (-1, 1) for m in (1, 10, 100)
                                 for s in (1.0, slope) if lo < K_i + sgn * m * eps / s < hi})
        parts = []
        for part in (np.real, np.imag):
            with warnings.catch_warnings():
                warnings.simplefilter("error", integrate.IntegrationWarning)
                try:
                    val, _ = integrate.quad(
                        lambda x: float(part(integrand(x, eps))) * phi(x),
                        lo, hi, points=points, limit=params.quad_limit,
                        epsabs=params.quad_tol, epsrel=params.quad_tol,
                    )
                except integrate.IntegrationWarning as exc:
                    raise QuadratureFailure(str(exc)) from exc
            parts.append(val)
        values.append(complex(parts[0], parts[1]))
    extrapolated = richardson(epsilons, values, min(params.extrapolation_order, len(epsilons) - 1))
    if return_details:
        return extrapolated.real, {"epsilons": epsilons, "values": values, "extrapolated": extrapolated,
                                   "sigma": sigma}
    return extrapolated.real


# ---------------------------------------------------------------- mixed theorem


def surface_terms(mode: TripleMode, mode2: TripleMode, form: MixedForm) -> list[PairTerm]:
    """Plane-wave pairs of C_3(z) = (E* x B')_3, or (E x B')_3 for the plain form."""
    conjugate = form is MixedForm.CONJUGATE_MINUS
    return pair_terms(mode, mode2, "EB", False, conjugate, product="cross_z")


def surface_sum(terms: Sequence[PairTerm], eps: float) -> complex:
    """Damped integral of dC_3/dz over the line, split at z = 0."""
    total = 0j
    for t in terms:
        if t.rho == 0:
            continue
        if t.region is Region.NEGATIVE:
            total += t.coeff * t.rho / (t.rho - 1j * eps)
        else:
            total -= t.coeff * t.rho / (t.rho + 1j * eps)
    return total


@dataclass
class MixedResult:
    value: complex
    damped_values: list[tuple[float, complex]]
    jump: complex  # C_3(0-) - C_3(0+)

    def eps_exponent(self) -> float:
        return eps_exponent([(e, v - self.value) for e, v in self.damped_values])


def mixed_theorem_integral(
    mode: TripleMode,
    mode2: TripleMode,
    form: MixedForm | str = MixedForm.CONJUGATE_MINUS,
    params: RegularizationParams | None = None,
    details: bool = False,
):
    """Integral of the mixed form, via the divergence of the cross product.

    Evaluated at k_par' = k_par (conjugate form) or k_par' = -k_par (plain
    form); other in-plane arguments give exactly 0. The value is
    ``(-i/omega) * S`` with S the damped integral of dC_3/dz, extrapolated.
    """
    params = params or RegularizationParams()
    form = MixedForm(form)
    if mode.kin.medium != mode2.kin.medium:
        raise ValueError("modes belong to different media")
    plus = form is MixedForm.PLAIN_PLUS
    if not _same_kpar(mode, mode2, plus=plus):
        res = MixedResult(0j, [(e, 0j) for e in params.epsilons], 0j)
        return res if details else res.value
    terms = surface_terms(mode, mode2, form)
    factor = -1j / mode.omega
    damped = [(e, factor * surface_sum(terms, e)) for e in params.epsilons]
    value = richardson(params.epsilons, [v for _, v in damped], params.extrapolation_order)
    jump = sum((t.coeff for t in terms if t.region is Region.NEGATIVE), 0j) - sum(
        (t.coeff for t in terms if t.region is Region.POSITIVE), 0j)
    res = MixedResult(value, damped, jump)
    return res if details else res.value


def mixed_direct(
    mode: TripleMode,
    mode2: TripleMode,
    form: MixedForm | str = MixedForm.CONJUGATE_MINUS,
    params: RegularizationParams | None = None,
) -> complex:
    """The same mixed integral summed directly from damped E and B overlaps.

    Only meaningful away from coincident pairs.
    """
    params = params or RegularizationParams()
    form = MixedForm(form)
    conjugate = form is MixedForm.CONJUGATE_MINUS
    if not _same_kpar(mode, mode2, plus=not conjugate):
        return 0j
    terms = _form_terms(mode, mode2, Form.MIXED, conjugate)
    values = [damped_sum(terms, e) for e in params.epsilons]
    return richardson(params.epsilons, values, params.extrapolation_order)


def divergence_identity_residual(mode: TripleMode, mode2: TripleMode, x: Sequence[float]) -> float:
    """Pointwise check of div(E* x B') = i (omega' n^2 E*.E' - omega B*.B').

    Uses per-component wavevectors, so x must lie off the interface.
    """
    x = np.asarray(x, dtype=float)
    region = Region.of(x[2])
    n2 = mode.kin.medium.index(region) ** 2
    div = 0j
    lhs_e = 0j
    lhs_b = 0j
    for w1 in mode.region_components(region):
        k1 = w1.wavevector(mode.k_parallel)
        ph1 = np.exp(1j * (k1 @ x))
        for w2 in mode2.region_components(region):
            k2 = w2.wavevector(mode2.k_parallel)
            ph2 = np.exp(1j * (k2 @ x))
            phase = np.conj(ph1) * ph2
            vec = np.cross(np.conj(w1.E), w2.B) * phase
            div += 1j * ((k2 - np.conj(k1)) @ vec)
            lhs_e += np.vdot(w1.E, w2.E) * phase
            lhs_b += np.vdot(w1.B, w2.B) * phase
    rhs = 1j * (mode2.omega * n2 * lhs_e - mode.omega * lhs_b)
    return float(abs(div - rhs) / max(1.0, abs(div), abs(rhs)))


# ---------------------------------------------------------------- norm scale


def norm_scale(mode: TripleMode, mode2: TripleMode, form: Form | str = Form.ELECTRIC) -> float:
    """Geometric mean of the two self-overlap delta weights in the given form."""
    form = Form(form)
    if form is Form.MIXED:
        form = Form.ELECTRIC

    def weight(m):
        fam = {
            (Polarization.TE, Form.ELECTRIC): Family.TE_E,
            (Polarization.TE, Form.MAGNETIC): Family.TE_B,
            (Polarization.TM, Form.ELECTRIC): Family.TM_E,
            (Polarization.TM, Form.MAGNETIC): Family.TM_B,
        }[(m.pol, form)]
        return expected_delta_weight(m, fam)

    return math.sqrt(weight(mode) * weight(mode2))


# ---------------------------------------------------------------- packet oracle


class OracleWeight(enum.Enum):
    N2_EE = "n2-ee"
    BB = "bb"
    MIXED = "mixed"

    @property
    def form(self) -> Form:
        return {OracleWeight.N2_EE: Form.ELECTRIC, OracleWeight.BB: Form.MAGNETIC,
                OracleWeight.MIXED: Form.MIXED}[self]


def _density(weight: OracleWeight):
    def dens(fa, fb, n2):
        ee = np.sum(np.conj(fa["E"]) * fb["E"], axis=-1)
        bb = np.sum(np.conj(fa["B"]) * fb["B"], axis=-1)
        if weight is OracleWeight.N2_EE:
            return n2 * ee
        if weight is OracleWeight.BB:
            return bb
        return n2 * ee - bb

    return dens


def box_quadrature_oracle(
    packet: PacketSpectrum,
    packet2: PacketSpectrum,
    weight: OracleWeight | str = OracleWeight.N2_EE,
    box: Box | float = 50.0,
    resolution: int = 12,
    tail_limit: float = 1e-2,
) -> complex:
    """Direct quadrature of the bilinear form of two packet fields over a box.

    Packet fields are ``sum_j w_j u_j F_j(x)`` (no time factor, no Ecal). A
    float ``box`` is a side length in units of the first packet's carrier
    wavelength.
    """
    from .expansion import carrier_wavelength

    weight = OracleWeight(weight)
    if packet.medium != packet2.medium or packet.dims != packet2.dims:
        raise ValueError("packets differ in medium or dims")
    if not isinstance(box, Box):
        box = Box(float(box) * carrier_wavelength(packet))
    bound = max(tail_bound(packet, box), tail_bound(packet2, box))
    if bound > tail_limit:
        raise TailTooLarge(f"packet tail bound {bound:.3e} exceeds {tail_limit:g}")
    return complex(integrate_on_box(packet, packet2, box, resolution, _density(weight), False))


def analytic_packet_overlap(
    packet: PacketSpectrum,
    packet2: PacketSpectrum,
    weight: OracleWeight | str = OracleWeight.N2_EE,
) -> complex:
    """(2 pi)^(dims-1) sum_j w_j conj(u_j) u'_j D_j over matching samples.

    D_j is the delta weight of sample j's mode with itself; samples match when
    wave vector, side and polarization agree. Principal parts of distinct
    samples vanish by orthogonality and are not summed.
    """
    weight = OracleWeight(weight)
    index = {(s.k, s.side, s.s): j for j, s in enumerate(packet2.samples)}
    total = 0j
    for j, smp in enumerate(packet.samples):
        j2 = index.get((smp.k, smp.side, smp.s))
        if j2 is None:
            continue
        other = packet2.samples[j2]
        if other.w != smp.w:
            raise ValueError("matched samples carry different quadrature weights")
        D = analytic_delta_weight(packet.modes[j], weight.form)
        total += smp.w * np.conj(smp.u) * other.u * D
    return complex(total * (2 * math.pi) ** (packet.dims - 1))


def packet_norm_scale(packet: PacketSpectrum, packet2: PacketSpectrum) -> float:
    a = abs(analytic_packet_overlap(packet, packet, OracleWeight.N2_EE))
    b = abs(analytic_packet_overlap(packet2, packet2, OracleWeight.N2_EE))
    return math.sqrt(a * b)
