"""Closed-form identities behind the orthogonality proofs.

Each identity is written once as a generic expression over objects exposing
``K_i, K_t, eps_i, eps_t`` (and ``kpar2`` where needed). The same expression
is evaluated

* on a single :class:`~triplemodes.medium.ModeKinematics`,
* on a :class:`KinematicsBatch` of numpy arrays (random sweeps), and
* on :class:`~triplemodes.exact.ExactKinematics` in Q(i), where the residual
  must vanish identically.
"""
from __future__ import annotations

import enum
import time
from dataclasses import asdict, dataclass, field
from fractions import Fraction
from typing import Callable, Iterable

import numpy as np

from .exact import ExactKinematics, GaussianRational, rational_pairs, rational_points
from .modes import TransmissionRule, fresnel_pair, legacy_transmission

FLOAT_TOL = 1e-12
JACOBIAN_FD_STEP = 1e-5
COMPLEX_STEP = 1e-20


class JacobianDirection(enum.Enum):
    TE = "te"  # closed form (n_i^2/n_t^2) |K_t|/|K_i|
    TM = "tm"  # closed form X_t/X_i


class JacobianMethod(enum.Enum):
    RICHARDSON = "richardson"
    COMPLEX_STEP = "complex-step"


@dataclass(frozen=True)
class KinematicsBatch:
    """Arrays of kinematics sharing one layout; ``sign`` is +1 left, -1 right."""

    K_i: np.ndarray
    K_t: np.ndarray
    eps_i: np.ndarray
    eps_t: np.ndarray
    kpar2: np.ndarray
    omega: np.ndarray
    sign: np.ndarray

    @property
    def X_i(self):
        return self.K_i / self.eps_i

    @property
    def X_t(self):
        return self.K_t / self.eps_t

    def __len__(self) -> int:
        return len(self.K_i)

    def __getitem__(self, idx) -> "KinematicsBatch":
        return KinematicsBatch(**{k: v[idx] for k, v in asdict_shallow(self).items()})


def asdict_shallow(obj) -> dict:
    return {f: getattr(obj, f) for f in obj.__dataclass_fields__}


@dataclass
class IdentityReport:
    name: str
    samples: int
    max_abs_residual: float
    exact_verified: bool
    exact_points: int = 0
    tolerance: float = FLOAT_TOL
    seconds: float = 0.0

    @property
    def passed(self) -> bool:
        return self.exact_verified and self.max_abs_residual <= self.tolerance

    def to_record(self) -> dict:
        rec = asdict(self)
        rec["passed"] = self.passed
        rec.pop("seconds")
        return rec


# ---------------------------------------------------------------- helpers


def _conj(x):
    return x.conjugate()


def _mag(x):
    if isinstance(x, GaussianRational):
        return abs(complex(x))
    return np.abs(x)


def _is_exact(x) -> bool:
    return isinstance(x, GaussianRational)


def _normals(kin):
    """Normal components as complex-capable values (exact values pass through)."""
    K_i, K_t = kin.K_i, kin.K_t
    if not _is_exact(K_i):
        K_i = np.asarray(K_i, dtype=complex) if isinstance(K_i, np.ndarray) else complex(K_i)
        K_t = np.asarray(K_t, dtype=complex) if isinstance(K_t, np.ndarray) else complex(K_t)
    return K_i, K_t


def _te(kin, rule: TransmissionRule = TransmissionRule.CONTINUITY):
    K_i, K_t = _normals(kin)
    r, t = fresnel_pair(K_i, K_t)
    if rule is TransmissionRule.LEGACY:
        t = legacy_transmission(K_i, K_t)
    return r, t


def _tm(kin):
    K_i, K_t = _normals(kin)
    return fresnel_pair(K_i / kin.eps_i, K_t / kin.eps_t)


def _relative(value, scale):
    """``|value| / scale`` elementwise, exact zero kept exact."""
    if _is_exact(value):
        return 0.0 if value.is_zero() else _mag(value) / max(float(scale), 1e-300)
    return np.abs(value) / np.maximum(scale, 1e-300)


def _max(residual) -> float:
    return float(np.max(residual)) if np.size(residual) else 0.0


# ---------------------------------------------------------------- brackets


def te_bracket_expr(kin, rule: TransmissionRule = TransmissionRule.CONTINUITY):
    K_i, K_t = _normals(kin)
    r, t = _te(kin, rule)
    return 1 + r * _conj(r) + t * _conj(t) * K_t / K_i - 2


def tm_bracket_expr(kin):
    K_i, K_t = _normals(kin)
    r, t = _tm(kin)
    return 1 + r * _conj(r) + t * _conj(t) * (K_t / kin.eps_t) / (K_i / kin.eps_i) - 2


def check_te_bracket(kin, rule: TransmissionRule = TransmissionRule.CONTINUITY) -> float:
    """``|1 + |a_r|^2 + |a_t|^2 K_t/K_i - 2|`` for a travelling transmitted wave."""
    return _max(_relative(te_bracket_expr(kin, rule), 1.0))


def check_tm_bracket(kin) -> float:
    return _max(_relative(tm_bracket_expr(kin), 1.0))


def check_evanescent_unimodular(kin, rule: TransmissionRule = TransmissionRule.CONTINUITY) -> float:
    a_r, _ = _te(kin, rule)
    b_r, _ = _tm(kin)
    if _is_exact(a_r):
        return max(_relative(a_r * _conj(a_r) - 1, 1.0), _relative(b_r * _conj(b_r) - 1, 1.0))
    return _max(np.maximum(np.abs(np.abs(a_r) - 1), np.abs(np.abs(b_r) - 1)))


# ---------------------------------------------------------------- principal parts


def copropagating_principal_terms(kin, kin2, coeffs, coeffs2, w_inc, w_trans):
    """Terms of the bracket whose product with ``i`` is the principal part.

    Both modes come from the same side. Incident-region terms are damped
    half-line integrals on the incident side, transmitted terms on the other;
    the sign of each group is that of the region (negative half-line: -1).
    """
    K_i, K_t = _normals(kin)
    K_i2, K_t2 = _normals(kin2)
    r, t = coeffs
    r2, t2 = coeffs2
    s = kin.sign if hasattr(kin, "sign") else kin.side.sign
    inc_sign, trans_sign = -s, s
    cr, ct = _conj(r), _conj(t)
    # K_i is real: conj(K_i) = K_i
    return [
        inc_sign * w_inc / (K_i2 - K_i),
        inc_sign * w_inc * r2 / (-K_i2 - K_i),
        inc_sign * w_inc * cr / (K_i2 + K_i),
        inc_sign * w_inc * cr * r2 / (-K_i2 + K_i),
        trans_sign * w_trans * ct * t2 / (K_t2 - _conj(K_t)),
    ]


def counter_principal_terms(kin_L, kin_R, coeffs_L, coeffs_R, w_left, w_right):
    """Bracket of the counter-propagating principal part (left mode first)."""
    K_i, K_t = _normals(kin_L)
    K_i2, K_t2 = _normals(kin_R)
    r, t = coeffs_L
    r2, t2 = coeffs_R
    cr, ct = _conj(r), _conj(t)
    cK_t = _conj(K_t)
    return [
        -w_left * t2 / (K_t2 - K_i),
        -w_left * cr * t2 / (K_t2 + K_i),
        w_right * ct / (K_i2 - cK_t),
        w_right * ct * r2 / (-K_i2 - cK_t),
    ]


def _sum_residual(terms):
    total = terms[0]
    scale = _mag(terms[0])
    for term in terms[1:]:
        total = total + term
        scale = scale + _mag(term)
    return _relative(total, scale)


def _omega2(kin):
    return kin.omega2 if isinstance(kin, ExactKinematics) else np.asarray(kin.omega) ** 2


def _sides(kin) -> int:
    return kin.sign if hasattr(kin, "sign") else kin.side.sign


def check_principal_cancellation(kin, kin2, rule: TransmissionRule = TransmissionRule.CONTINUITY) -> float:
    """Two-sided resonance identity plus the full principal sums (TE-E and TM-B).

    Requires a copropagating pair at the same k_parallel and distinct
    frequencies.
    """
    if np.any(np.asarray(_omega2(kin) == _omega2(kin2))):
        raise ValueError("principal cancellation needs distinct frequencies")
    K_i, K_t = _normals(kin)
    K_i2, K_t2 = _normals(kin2)
    lhs = kin.eps_i / ((K_i2 - K_i) * (K_i2 + K_i))
    cK_t = _conj(K_t)
    rhs = kin.eps_t / ((K_t2 - cK_t) * (K_t2 + cK_t))
    two_sided = _relative(lhs - rhs, np.maximum(_mag(lhs), _mag(rhs)) if not _is_exact(lhs) else 1)
    te = copropagating_principal_terms(kin, kin2, _te(kin, rule), _te(kin2, rule), kin.eps_i, kin.eps_t)
    tm = copropagating_principal_terms(kin, kin2, _tm(kin), _tm(kin2), 1, 1)
    parts = [two_sided, _sum_residual(te), _sum_residual(tm)]
    if _is_exact(lhs):
        return max(parts)
    return _max(np.maximum.reduce([np.broadcast_to(p, np.shape(parts[1])) for p in parts]))


def check_counter_cancellation(kin_L, kin_R, rule: TransmissionRule = TransmissionRule.CONTINUITY) -> float:
    """Principal part of a left/right pair; the n_1, n_2 there are (n_left, n_right)."""
    if np.any(np.asarray(_sides(kin_L)) != 1) or np.any(np.asarray(_sides(kin_R)) != -1):
        raise ValueError("expected a left mode and a right mode")
    K_i, K_t = _normals(kin_L)
    K_i2, K_t2 = _normals(kin_R)
    eps_left, eps_right = kin_L.eps_i, kin_L.eps_t
    cK_t = _conj(K_t)
    lhs = K_i2 * K_i2 - cK_t * cK_t
    rhs = (eps_right / eps_left) * (K_t2 * K_t2 - K_i * K_i)
    scale = 1 if _is_exact(lhs) else np.maximum(_mag(lhs), _mag(rhs))
    two_sided = _relative(lhs - rhs, scale)
    te = counter_principal_terms(kin_L, kin_R, _te(kin_L, rule), _te(kin_R, rule), eps_left, eps_right)
    tm = counter_principal_terms(kin_L, kin_R, _tm(kin_L), _tm(kin_R), 1, 1)
    parts = [two_sided, _sum_residual(te), _sum_residual(tm)]
    if _is_exact(lhs):
        return max(parts)
    return _max(np.maximum.reduce([np.broadcast_to(p, np.shape(parts[1])) for p in parts]))


# ---------------------------------------------------------------- Jacobian


def jacobian_closed_form(kin, direction: JacobianDirection):
    K_i, K_t = _normals(kin)
    if direction is JacobianDirection.TE:
        return (kin.eps_i / kin.eps_t) * _mag(K_t) / _mag(K_i)
    return (K_t / kin.eps_t) / (K_i / kin.eps_i)


def _incoming_from_transmitted(kin):
    """K_i as a function of K_t at fixed k_parallel (complex-analytic)."""
    ratio = kin.eps_i / kin.eps_t
    k2 = kin.kpar2
    s = _sides(kin)

    def f(K_t):
        return s * np.sqrt(ratio * (K_t * K_t + k2) - k2 + 0j)

    return f


def jacobian_numeric(kin, method: JacobianMethod = JacobianMethod.RICHARDSON, h: float = JACOBIAN_FD_STEP):
    """|dK_i/dK_t| at fixed k_parallel by differentiating the dispersion relations."""
    f = _incoming_from_transmitted(kin)
    K_t = np.real(np.asarray(kin.K_t, dtype=complex))
    if method is JacobianMethod.COMPLEX_STEP:
        return np.abs(np.imag(f(K_t + 1j * COMPLEX_STEP)) / COMPLEX_STEP)

    def central(step):
        return np.real(f(K_t + step) - f(K_t - step)) / (2 * step)

    d1, d2 = central(h), central(h / 2)
    return np.abs((4 * d2 - d1) / 3)


def _exact_jacobian(kin: ExactKinematics, direction: JacobianDirection):
    # K_i^2 is quadratic in K_t, so a central difference of it is exact
    h = Fraction(1, 1000)
    ratio = kin.eps_i / kin.eps_t

    def Ki2(K_t):
        return ratio * (K_t * K_t + kin.kpar2) - kin.kpar2

    d_sq = (Ki2(kin.K_t + h) - Ki2(kin.K_t - h)) / (2 * h)
    numeric = d_sq / (2 * kin.K_i)
    if direction is JacobianDirection.TE:
        closed = ratio * kin.K_t / kin.K_i  # travelling left point: both positive
    else:
        closed = kin.X_t / kin.X_i
    return numeric - closed


def check_delta_jacobian(
    kin,
    direction: JacobianDirection | str = JacobianDirection.TE,
    method: JacobianMethod | str = JacobianMethod.RICHARDSON,
    h: float = JACOBIAN_FD_STEP,
) -> float:
    """Relative gap between numeric and closed-form delta Jacobians."""
    direction = JacobianDirection(direction)
    method = JacobianMethod(method)
    if isinstance(kin, ExactKinematics):
        return _relative(_exact_jacobian(kin, direction), 1)
    closed = np.abs(jacobian_closed_form(kin, direction))
    numeric = jacobian_numeric(kin, method, h)
    return _max(np.abs(numeric - closed) / closed)


# ---------------------------------------------------------------- surface identity


def surface_identity_terms(K_i2, K_t2, r, r2, t, t2):
    lhs = 1 - r2 + _conj(r) - r2 * _conj(r)
    rhs = (K_t2 / K_i2) * t2 * _conj(t)
    return lhs, rhs


def _surface_residual(lhs, rhs):
    if _is_exact(lhs):
        return _relative(lhs - rhs, 1)
    scale = np.maximum(1.0, np.maximum(np.abs(lhs), np.abs(rhs)))
    return np.abs(lhs - rhs) / scale


def check_surface_identity(kin, kin2, rule: TransmissionRule = TransmissionRule.CONTINUITY) -> float:
    _, _ = _normals(kin)
    K_i2, K_t2 = _normals(kin2)
    r, t = _te(kin, rule)
    r2, t2 = _te(kin2, rule)
    return _max(_surface_residual(*surface_identity_terms(K_i2, K_t2, r, r2, t, t2)))


def check_tm_te_substitution(kin, kin2, rule: TransmissionRule = TransmissionRule.CONTINUITY) -> float:
    """The surface identity on (K, a) arguments and again on (X, b) arguments."""
    te = check_surface_identity(kin, kin2, rule)
    K_i2, K_t2 = _normals(kin2)
    b_r, b_t = _tm(kin)
    b_r2, b_t2 = _tm(kin2)
    tm = _max(_surface_residual(*surface_identity_terms(
        K_i2 / kin2.eps_i, K_t2 / kin2.eps_t, b_r, b_r2, b_t, b_t2)))
    return max(te, tm)


# ---------------------------------------------------------------- random kinematics


def _normal_batch(eps, omega, kpar2, sign):
    k2 = eps * omega**2 - kpar2
    root = np.sqrt(np.abs(k2))
    return np.where(k2 >= 0, sign * root + 0j, 1j * sign * root)


def batch_from_arrays(eps_left, eps_right, omega, kpar2, sign) -> KinematicsBatch:
    eps_left, eps_right, omega, kpar2, sign = np.broadcast_arrays(
        *(np.asarray(a, dtype=float) for a in (eps_left, eps_right, omega, kpar2, sign)))
    eps_i = np.where(sign > 0, eps_left, eps_right)
    eps_t = np.where(sign > 0, eps_right, eps_left)
    K_i = _normal_batch(eps_i, omega, kpar2, sign).real
    K_t = _normal_batch(eps_t, omega, kpar2, sign)
    return KinematicsBatch(K_i, K_t, eps_i, eps_t, kpar2, omega, sign.astype(int))


def _media(rng, size):
    n_left = rng.uniform(1.05, 3.0, size)
    return n_left**2, np.ones(size)


def random_kinematics(rng: np.random.Generator, size: int, regime: str = "travelling") -> KinematicsBatch:
    """Random valid kinematics; ``regime`` is travelling, evanescent or any.

    Travelling samples mix left and right incidence; evanescent ones are
    necessarily left-incident. Incidence angles stay below 80 degrees.
    """
    eps_l, eps_r = _media(rng, size)
    n_l, n_r = np.sqrt(eps_l), np.sqrt(eps_r)
    omega = rng.uniform(0.5, 2.0, size)
    if regime == "any":
        regime_arr = rng.random(size) < 0.5
        trav = random_kinematics(rng, size, "travelling")
        evan = random_kinematics(rng, size, "evanescent")
        pick = {f: np.where(regime_arr, getattr(trav, f), getattr(evan, f)) for f in trav.__dataclass_fields__}
        return KinematicsBatch(**pick)
    if regime == "travelling":
        sign = np.where(rng.random(size) < 0.5, 1, -1)
        n_cap = np.minimum(n_l, n_r) * omega
        kpar = rng.uniform(0.0, 0.98, size) * n_cap
    elif regime == "evanescent":
        sign = np.ones(size, dtype=int)
        lo, hi = 1.01 * n_r * omega, np.minimum(0.985 * n_l * omega, np.sin(np.radians(80)) * n_l * omega)
        hi = np.maximum(hi, lo * 1.001)
        kpar = rng.uniform(0.0, 1.0, size) * (hi - lo) + lo
    else:
        raise ValueError(f"unknown regime {regime!r}")
    return batch_from_arrays(eps_l, eps_r, omega, kpar**2, sign)


def _omega_in(rng, size, kpar, n_i, n_t, travelling, upper_half):
    """Frequency in the travelling or evanescent window for given k_parallel.

    ``upper_half`` selects which half of the window, so two draws with opposite
    halves are separated.
    """
    u = rng.uniform(0.55, 0.95, size) if upper_half else rng.uniform(0.05, 0.45, size)
    if travelling:
        lo, hi = 1.02 * kpar / n_t, 3.0 * kpar / n_t
    else:
        lo, hi = 1.01 * kpar / n_i, 0.99 * kpar / n_t
    return lo + u * (hi - lo)


def random_copropagating_pairs(
    rng: np.random.Generator, size: int, combination: tuple[bool, bool] | None = None,
) -> tuple[KinematicsBatch, KinematicsBatch]:
    """Pairs from the same side at equal k_parallel and distinct frequencies.

    ``combination`` fixes whether each transmitted wave travels; ``None``
    draws all four combinations for left pairs and adds right pairs.
    """
    if combination is None:
        quarter = size // 5
        parts = [random_copropagating_pairs(rng, quarter, c)
                 for c in ((True, True), (True, False), (False, True), (False, False))]
        parts.append(_right_pairs(rng, size - 4 * quarter))
        return _concat([p[0] for p in parts]), _concat([p[1] for p in parts])
    eps_l, eps_r = _media(rng, size)
    n_l, n_r = np.sqrt(eps_l), np.sqrt(eps_r)
    kpar = rng.uniform(0.2, 2.0, size)
    flip = rng.random(size) < 0.5
    w1 = _omega_in(rng, size, kpar, n_l, n_r, combination[0], False)
    w2 = _omega_in(rng, size, kpar, n_l, n_r, combination[1], True)
    if combination[0] == combination[1]:
        w1, w2 = np.where(flip, w2, w1), np.where(flip, w1, w2)
    sign = np.ones(size)
    return (batch_from_arrays(eps_l, eps_r, w1, kpar**2, sign),
            batch_from_arrays(eps_l, eps_r, w2, kpar**2, sign))


def _right_pairs(rng, size):
    eps_l, eps_r = _media(rng, size)
    kpar = rng.uniform(0.2, 2.0, size)
    w1 = _omega_in(rng, size, kpar, 1.0, 1.0, True, False)
    w2 = _omega_in(rng, size, kpar, 1.0, 1.0, True, True)
    sign = -np.ones(size)
    return (batch_from_arrays(eps_l, eps_r, w1, kpar**2, sign),
            batch_from_arrays(eps_l, eps_r, w2, kpar**2, sign))


def random_counter_pairs(rng: np.random.Generator, size: int) -> tuple[KinematicsBatch, KinematicsBatch]:
    """Left mode (travelling or evanescent) with a right mode at equal k_parallel."""
    eps_l, eps_r = _media(rng, size)
    n_l, n_r = np.sqrt(eps_l), np.sqrt(eps_r)
    kpar = rng.uniform(0.2, 2.0, size)
    travelling = rng.random(size) < 0.5
    w_trav = _omega_in(rng, size, kpar, n_l, n_r, True, False)
    w_evan = _omega_in(rng, size, kpar, n_l, n_r, False, False)
    w1 = np.where(travelling, w_trav, w_evan)
    # right modes need omega > k/n_right; keep clear of omega' = omega
    w2 = _omega_in(rng, size, kpar, n_r, n_r, True, True)
    w2 = np.where(np.abs(w2 - w1) < 0.05 * w1, 1.2 * w1 + 0.1, w2)
    return (batch_from_arrays(eps_l, eps_r, w1, kpar**2, 1),
            batch_from_arrays(eps_l, eps_r, w2, kpar**2, -1))


def _concat(batches: list[KinematicsBatch]) -> KinematicsBatch:
    return KinematicsBatch(**{f: np.concatenate([getattr(b, f) for b in batches])
                              for f in KinematicsBatch.__dataclass_fields__})


# ---------------------------------------------------------------- suite


def _spread(items: list, count: int) -> list:
    if len(items) <= count:
        return list(items)
    idx = np.linspace(0, len(items) - 1, count).round().astype(int)
    return [items[i] for i in idx]


@dataclass
class ExactSet:
    travelling: list[ExactKinematics] = field(default_factory=list)
    evanescent: list[ExactKinematics] = field(default_factory=list)
    copropagating: list[tuple[ExactKinematics, ExactKinematics]] = field(default_factory=list)
    counter: list[tuple[ExactKinematics, ExactKinematics]] = field(default_factory=list)


def exact_set(per_check: int = 16) -> ExactSet:
    points = rational_points()
    pairs = rational_pairs(points)
    by_combo: dict[tuple[bool, bool], list] = {}
    for p, q in pairs:
        by_combo.setdefault((p.evanescent, q.evanescent), []).append((p, q))
    co = []
    for combo in sorted(by_combo):
        co.extend(_spread(by_combo[combo], per_check // 4 + 1))
    counter = [(p, q.mirrored()) for p, q in pairs if not q.evanescent]
    return ExactSet(
        travelling=_spread([p for p in points if not p.evanescent], per_check),
        evanescent=_spread([p for p in points if p.evanescent], per_check),
        copropagating=co,
        counter=_spread(counter, per_check),
    )


IDENTITY_NAMES = (
    "te_bracket",
    "tm_bracket",
    "evanescent_unimodular",
    "principal_cancellation",
    "counter_cancellation",
    "delta_jacobian",
    "surface_identity",
    "tm_te_substitution",
)


def run_suite(
    samples: int = 10_000,
    seed: int = 0,
    rule: TransmissionRule = TransmissionRule.CONTINUITY,
    exact_per_check: int = 16,
    tolerance: float = FLOAT_TOL,
    names: Iterable[str] | None = None,
) -> list[IdentityReport]:
    """Floating sweeps over ``samples`` random inputs plus exact checks."""
    if samples < 1:
        raise ValueError("samples must be positive")
    rng = np.random.default_rng(seed)
    trav = random_kinematics(rng, samples, "travelling")
    evan = random_kinematics(rng, samples, "evanescent")
    co = random_copropagating_pairs(rng, samples)
    counter = random_counter_pairs(rng, samples)
    ex = exact_set(exact_per_check)

    def jac(k):
        return max(check_delta_jacobian(k, JacobianDirection.TE, JacobianMethod.COMPLEX_STEP),
                   check_delta_jacobian(k, JacobianDirection.TM, JacobianMethod.COMPLEX_STEP))

    def jac_exact(k):
        return max(check_delta_jacobian(k, JacobianDirection.TE), check_delta_jacobian(k, JacobianDirection.TM))

    table: dict[str, tuple[Callable[[], float], Callable[[], list[float]]]] = {
        "te_bracket": (lambda: check_te_bracket(trav, rule),
                       lambda: [check_te_bracket(k, rule) for k in ex.travelling]),
        "tm_bracket": (lambda: check_tm_bracket(trav),
                       lambda: [check_tm_bracket(k) for k in ex.travelling]),
        "evanescent_unimodular": (lambda: check_evanescent_unimodular(evan, rule),
                                  lambda: [check_evanescent_unimodular(k, rule) for k in ex.evanescent]),
        "principal_cancellation": (lambda: check_principal_cancellation(*co, rule),
                                   lambda: [check_principal_cancellation(p, q, rule) for p, q in ex.copropagating]),
        "counter_cancellation": (lambda: check_counter_cancellation(*counter, rule),
                                 lambda: [check_counter_cancellation(p, q, rule) for p, q in ex.counter]),
        "delta_jacobian": (lambda: jac(trav), lambda: [jac_exact(k) for k in ex.travelling]),
        "surface_identity": (lambda: check_surface_identity(*co, rule),
                             lambda: [check_surface_identity(p, q, rule) for p, q in ex.copropagating]),
        "tm_te_substitution": (lambda: check_tm_te_substitution(*co, rule),
                               lambda: [check_tm_te_substitution(p, q, rule) for p, q in ex.copropagating]),
    }
    selected = list(IDENTITY_NAMES) if names is None else list(names)
    reports = []
    for name in selected:
        if name not in table:
            raise ValueError(f"unknown identity {name!r}")
        start = time.perf_counter()
        floating, exact = table[name]
        residual = floating()
        exact_residuals = exact()
        reports.append(IdentityReport(
            name=name,
            samples=samples,
            max_abs_residual=float(residual),
            exact_verified=bool(exact_residuals) and all(r == 0 for r in exact_residuals),
            exact_points=len(exact_residuals),
            tolerance=tolerance,
            seconds=time.perf_counter() - start,
        ))
    return reports

