"""Wave packets built from normalized triple modes, and their field energy.

A real free field is synthesised as::

    E(x, t) = i sum_j Ecal(k_j) w_j [u_j E_j(x) e^{-i w_j t} - c.c.]
            = -2 Im sum_j Ecal(k_j) w_j u_j E_j(x) e^{-i w_j t}

with the same amplitudes for B. Samples ``j`` carry a wave vector (the
incoming one of their mode), a side, a polarization, a complex amplitude and
a quadrature weight.

The default geometry is reduced (``dims=2``): k_y = 0, fields are independent
of y and every spatial integral is per unit length in y. Then TE electric
fields point exactly along y and TM electric fields lie exactly in the x-z
plane.
"""
from __future__ import annotations

import enum
import json
import math
from dataclasses import dataclass, field
from functools import cached_property
from typing import Iterable, Sequence

import numpy as np
from scipy.special import erfc

from .errors import ResolutionTooCoarse, TailTooLarge, ZeroWaveVector
from .medium import HalfSpaceMedium, Region, Side, kinematics_from_normal
from .modes import NormalizationVariant, Polarization, TripleMode, build_mode

SCHEMA_VERSION = 1
TAIL_LIMIT = 1e-3
MIN_NODES_PER_WAVELENGTH = 8


class DomainConvention(enum.Enum):
    """How the sign of a sample's normal wave number relates to its side.

    ``MODE_SIDE``: K > 0 for left modes, K < 0 for right modes (the mode's own
    incoming wave vector). ``LITERAL``: the opposite pairing, K < 0 with left
    coefficients; the mode is then built from the mirrored vector (kx, ky, -K).
    """

    MODE_SIDE = "mode-side"
    LITERAL = "literal"


@dataclass(frozen=True)
class SpectralSample:
    k: tuple[float, float, float]
    side: Side
    s: Polarization
    u: complex
    w: float


def amplitude_factor(k: Sequence[float]) -> float:
    """sqrt(|k| / (2 (2 pi)^3)) in natural units."""
    norm = float(np.linalg.norm(k))
    if norm == 0.0:
        raise ZeroWaveVector("amplitude factor undefined at k = 0")
    return math.sqrt(norm / (2.0 * (2.0 * math.pi) ** 3))


@dataclass
class PacketSpectrum:
    medium: HalfSpaceMedium
    samples: list[SpectralSample]
    dims: int = 3
    bandwidth: list[dict] = field(default_factory=list)
    convention: DomainConvention = DomainConvention.MODE_SIDE

    def __post_init__(self):
        if self.dims not in (2, 3):
            raise ValueError("dims must be 2 or 3")
        for smp in self.samples:
            if not smp.w > 0:
                raise ValueError("quadrature weights must be positive")
            K = smp.k[2]
            want_positive = (smp.side is Side.LEFT) == (self.convention is DomainConvention.MODE_SIDE)
            if K == 0 or (K > 0) != want_positive:
                raise ValueError(f"sample k={smp.k} inconsistent with side {smp.side.value}")
            if self.dims == 2 and smp.k[1] != 0:
                raise ValueError("reduced geometry needs k_y = 0")

    def incoming_wavevector(self, smp: SpectralSample) -> tuple[float, float, float]:
        if self.convention is DomainConvention.LITERAL:
            return (smp.k[0], smp.k[1], -smp.k[2])
        return smp.k

    @cached_property
    def modes(self) -> list[TripleMode]:
        out = []
        for smp in self.samples:
            kx, ky, K = self.incoming_wavevector(smp)
            kin = kinematics_from_normal(self.medium, K, (kx, ky), smp.side)
            out.append(build_mode(kin, smp.s, NormalizationVariant.NORMALIZED))
        return out

    def __add__(self, other: "PacketSpectrum") -> "PacketSpectrum":
        if other.medium != self.medium or other.dims != self.dims or other.convention != self.convention:
            raise ValueError("spectra differ in medium, dims or convention")
        return PacketSpectrum(self.medium, self.samples + other.samples, self.dims,
                              self.bandwidth + other.bandwidth, self.convention)

    # ------------------------------------------------------------ JSON

    def to_dict(self) -> dict:
        return {
            "schema": SCHEMA_VERSION,
            "medium": {"n_left": self.medium.n_left, "n_right": self.medium.n_right,
                       "generalized": self.medium.generalized},
            "dims": self.dims,
            "convention": self.convention.value,
            "bandwidth": self.bandwidth,
            "samples": [
                {"k": list(s.k), "side": s.side.value, "s": int(s.s), "u": [s.u.real, s.u.imag], "w": s.w}
                for s in self.samples
            ],
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), sort_keys=True)

    @classmethod
    def from_dict(cls, doc: dict) -> "PacketSpectrum":
        if doc.get("schema") != SCHEMA_VERSION:
            raise ValueError(f"unsupported spectrum schema {doc.get('schema')!r}")
        med = doc["medium"]
        medium = HalfSpaceMedium(med["n_left"], med.get("n_right", 1.0), med.get("generalized", False))
        samples = [
            SpectralSample(tuple(float(c) for c in s["k"]), Side.parse(s["side"]),
                           Polarization.parse(s["s"]), complex(*s["u"]), float(s["w"]))
            for s in doc["samples"]
        ]
        return cls(medium, samples, int(doc.get("dims", 3)), list(doc.get("bandwidth", [])),
                   DomainConvention(doc.get("convention", DomainConvention.MODE_SIDE.value)))

    @classmethod
    def from_json(cls, text: str) -> "PacketSpectrum":
        return cls.from_dict(json.loads(text))


def gaussian_packet(
    medium: HalfSpaceMedium,
    k0: Sequence[float],
    side: Side | str = Side.LEFT,
    pol: Polarization | str = Polarization.TE,
    rel_bandwidth: float = 0.02,
    nodes: int = 32,
    span: float = 4.0,
    dims: int = 2,
    center: Sequence[float] = (0.0, 0.0, 0.0),
    amplitude: complex = 1.0,
) -> PacketSpectrum:
    """Gaussian spectrum around the incoming wave vector ``k0``.

    Width s = rel_bandwidth * |k0|; ``nodes`` uniform samples per axis over
    k0 +/- span*s. ``center`` shifts the packet in space at t = 0.
    """
    side = Side.parse(side)
    pol = Polarization.parse(pol)
    k0 = np.asarray(k0, dtype=float)
    if dims == 2 and k0[1] != 0:
        raise ValueError("reduced geometry needs k0_y = 0")
    s = rel_bandwidth * float(np.linalg.norm(k0))
    if not s > 0:
        raise ZeroWaveVector("k0 must be nonzero")
    if abs(k0[2]) <= span * s or (k0[2] > 0) != (side is Side.LEFT):
        raise ValueError("packet normal wave numbers must keep the sign of the side")
    offsets = np.linspace(-span * s, span * s, nodes)
    step = offsets[1] - offsets[0]
    axes = [k0[0] + offsets, np.array([0.0]) if dims == 2 else k0[1] + offsets, k0[2] + offsets]
    weight = step**dims
    center = np.asarray(center, dtype=float)
    samples = []
    for kx in axes[0]:
        for ky in axes[1]:
            for K in axes[2]:
                k = np.array([kx, ky, K])
                u = amplitude * math.exp(-float((k - k0) @ (k - k0)) / (2 * s * s))
                u *= complex(np.exp(-1j * (k @ center)))
                samples.append(SpectralSample((float(kx), float(ky), float(K)), side, pol, u, weight))
    band = {"k0": k0.tolist(), "s": s, "center": center.tolist()}
    return PacketSpectrum(medium, samples, dims, [band])


# ---------------------------------------------------------------- plane-wave table


@dataclass(frozen=True)
class WaveTable:
    """All plane waves of a spectrum, indexed (sample, component)."""

    kx: np.ndarray
    ky: np.ndarray
    omega: np.ndarray
    K: np.ndarray  # (J, 3)
    negative: np.ndarray  # (J, 3) component lives in z < 0
    E: np.ndarray  # (J, 3, 3)
    B: np.ndarray  # (J, 3, 3)
    coef: np.ndarray  # (J,)


def wave_table(spec: PacketSpectrum, amplitude: bool = True) -> WaveTable:
    """Plane-wave data; ``coef`` is Ecal*w*u, or w*u with ``amplitude=False``."""
    modes = spec.modes
    J = len(modes)
    K = np.zeros((J, 3), dtype=complex)
    neg = np.zeros((J, 3), dtype=bool)
    E = np.zeros((J, 3, 3), dtype=complex)
    B = np.zeros((J, 3, 3), dtype=complex)
    coef = np.zeros(J, dtype=complex)
    for j, (mode, smp) in enumerate(zip(modes, spec.samples)):
        for c, wave in enumerate(mode.components):
            K[j, c] = wave.K
            neg[j, c] = wave.region is Region.NEGATIVE
            E[j, c] = wave.E
            B[j, c] = wave.B
        scale = amplitude_factor(smp.k) if amplitude else 1.0
        coef[j] = scale * smp.w * smp.u
    kx = np.array([m.k_parallel[0] for m in modes])
    ky = np.array([m.k_parallel[1] for m in modes])
    omega = np.array([m.omega for m in modes])
    return WaveTable(kx, ky, omega, K, neg, E, B, coef)


def _z_profiles(table: WaveTable, z: np.ndarray, t: float, which: str) -> np.ndarray:
    """A[j, iz, :] = coef_j e^{-i w_j t} sum_c [region matches] amp_c e^{i K_c z}."""
    amps = table.E if which == "E" else table.B
    zneg = z < 0
    out = np.zeros((len(table.kx), len(z), 3), dtype=complex)
    time_phase = table.coef * np.exp(-1j * table.omega * t)
    for c in range(3):
        mask = table.negative[:, c][:, None] == zneg[None, :]
        zz = np.where(mask, z[None, :], 0.0)
        prof = np.where(mask, np.exp(1j * table.K[:, c][:, None] * zz), 0.0)
        out += prof[:, :, None] * amps[:, c, None, :]
    return out * time_phase[:, None, None]


def complex_field_grid(table: WaveTable, xs, ys, zs, t: float, which: str, profiles=None) -> np.ndarray:
    """sum_j coef_j F_j(x) e^{-i w_j t} on a tensor grid, shape (Nx, Ny, Nz, 3).

    ``profiles`` may carry precomputed z profiles for the same ``zs`` and t.
    """
    xs, ys, zs = (np.atleast_1d(np.asarray(a, dtype=float)) for a in (xs, ys, zs))
    A = _z_profiles(table, zs, t, which) if profiles is None else profiles
    J = len(table.kx)
    Pxy = np.exp(1j * (xs[:, None, None] * table.kx[None, None, :] + ys[None, :, None] * table.ky[None, None, :]))
    Pxy = Pxy.reshape(len(xs) * len(ys), J)
    out = Pxy @ A.reshape(J, len(zs) * 3)
    return out.reshape(len(xs), len(ys), len(zs), 3)


def complex_field_points(table: WaveTable, points, t: float, which: str) -> np.ndarray:
    pts = np.atleast_2d(np.asarray(points, dtype=float))
    out = np.zeros((len(pts), 3), dtype=complex)
    for n, (x, y, z) in enumerate(pts):
        out[n] = complex_field_grid(table, [x], [y], [z], t, which)[0, 0, 0]
    return out


def synthesize_field(spec: PacketSpectrum, t: float, x) -> tuple[np.ndarray, np.ndarray]:
    """Real E and B of the packet at time t and point(s) x."""
    pts = np.asarray(x, dtype=float)
    single = pts.ndim == 1
    if not spec.samples:
        zero = np.zeros((1 if single else len(pts), 3))
        return (zero[0], zero[0].copy()) if single else (zero, zero.copy())
    table = wave_table(spec)
    E = -2.0 * np.imag(complex_field_points(table, pts, t, "E"))
    B = -2.0 * np.imag(complex_field_points(table, pts, t, "B"))
    return (E[0], B[0]) if single else (E, B)


# ---------------------------------------------------------------- box quadrature


@dataclass(frozen=True)
class Box:
    """Cube of side ``L`` centred at ``center`` (a square in x-z for dims=2)."""

    L: float
    center: tuple[float, float, float] = (0.0, 0.0, 0.0)


def panel_nodes(lo: float, hi: float, panel: float, nodes: int) -> tuple[np.ndarray, np.ndarray]:
    """Composite Gauss-Legendre rule with panels no longer than ``panel``."""
    count = max(1, int(math.ceil((hi - lo) / panel - 1e-12)))
    edges = np.linspace(lo, hi, count + 1)
    g, gw = np.polynomial.legendre.leggauss(nodes)
    half = 0.5 * np.diff(edges)
    mid = 0.5 * (edges[:-1] + edges[1:])
    x = (mid[:, None] + half[:, None] * g[None, :]).ravel()
    w = (half[:, None] * gw[None, :]).ravel()
    return x, w


def box_rule(box: Box, wavelength: float, resolution: int, dims: int):
    """Nodes and weights per axis; z panels break at the interface."""
    if resolution < MIN_NODES_PER_WAVELENGTH:
        raise ResolutionTooCoarse(
            f"{resolution} nodes per wavelength; need at least {MIN_NODES_PER_WAVELENGTH}")
    cx, cy, cz = box.center
    h = box.L / 2
    xs, wx = panel_nodes(cx - h, cx + h, wavelength, resolution)
    if dims == 2:
        ys, wy = np.array([0.0]), np.array([1.0])
    else:
        ys, wy = panel_nodes(cy - h, cy + h, wavelength, resolution)
    zlo, zhi = cz - h, cz + h
    if zlo < 0 < zhi:
        z1, w1 = panel_nodes(zlo, 0.0, wavelength, resolution)
        z2, w2 = panel_nodes(0.0, zhi, wavelength, resolution)
        zs, wz = np.concatenate([z1, z2]), np.concatenate([w1, w2])
    else:
        zs, wz = panel_nodes(zlo, zhi, wavelength, resolution)
    return (xs, wx), (ys, wy), (zs, wz)


def shortest_wavelength(spec: PacketSpectrum) -> float:
    """Shortest real wavelength among all plane waves of the spectrum."""
    kmax = 0.0
    for mode in spec.modes:
        for region in (Region.NEGATIVE, Region.POSITIVE):
            kmax = max(kmax, mode.kin.medium.index(region) * mode.omega)
    return 2 * math.pi / kmax


def tail_bound(spec: PacketSpectrum, box: Box, t: float = 0.0) -> float:
    """Gaussian bound on the packet energy outside the box.

    Each packet may have moved a distance |t| (speed <= 1) from its centre;
    per axis the fraction beyond distance a of a width-s envelope is erfc(s a).
    """
    total = 0.0
    axes = (0, 2) if spec.dims == 2 else (0, 1, 2)
    for band in spec.bandwidth:
        s = band["s"]
        for ax in axes:
            offset = abs(band["center"][ax] - box.center[ax])
            room = box.L / 2 - offset - abs(t)
            total += 1.0 if room <= 0 else float(erfc(s * room))
    return total


def integrate_on_box(spec_a, spec_b, box, resolution, integrand, amplitude, t=0.0, chunk=64):
    """Quadrature of ``integrand(fields_a, fields_b, n2)`` over the box.

    Fields are the complex sums ``sum_j coef_j F_j e^{-i w_j t}`` for
    F in {E, B}; ``amplitude`` selects whether coef includes Ecal.
    """
    wl = min(shortest_wavelength(spec_a), shortest_wavelength(spec_b))
    (xs, wx), (ys, wy), (zs, wz) = box_rule(box, wl, resolution, spec_a.dims)
    ta = wave_table(spec_a, amplitude)
    tb = ta if spec_b is spec_a else wave_table(spec_b, amplitude)
    prof_a = {w: _z_profiles(ta, zs, t, w) for w in ("E", "B")}
    prof_b = prof_a if tb is ta else {w: _z_profiles(tb, zs, t, w) for w in ("E", "B")}
    n2 = np.where(zs < 0, spec_a.medium.n_left**2, spec_a.medium.n_right**2)[None, None, :]
    total = 0.0
    for start in range(0, len(xs), chunk):
        sl = slice(start, start + chunk)
        fa = {w: complex_field_grid(ta, xs[sl], ys, zs, t, w, prof_a[w]) for w in ("E", "B")}
        fb = fa if tb is ta else {w: complex_field_grid(tb, xs[sl], ys, zs, t, w, prof_b[w]) for w in ("E", "B")}
        total = total + np.einsum("i,j,k,ijk->", wx[sl], wy, wz, integrand(fa, fb, n2))
    return total


def field_energy(spec: PacketSpectrum, box: Box, resolution: int = 12, t: float = 0.0,
                 tail_limit: float = TAIL_LIMIT) -> float:
    """(1/2) integral of n^2 E^2 + B^2 over the box at time t."""
    if not spec.samples:
        return 0.0
    bound = tail_bound(spec, box, t)
    if bound > tail_limit:
        raise TailTooLarge(f"packet tail bound {bound:.3e} exceeds {tail_limit:g}; enlarge the box")

    def density(fa, fb, n2):
        E = -2.0 * np.imag(fa["E"])
        B = -2.0 * np.imag(fa["B"])
        return 0.5 * (n2 * np.sum(E * E, axis=-1) + np.sum(B * B, axis=-1))

    return float(integrate_on_box(spec, spec, box, resolution, density, True, t))


def diagonal_energy(spec: PacketSpectrum) -> float:
    """Mode-sum energy sum_j w_j |k_j| |u_j|^2.

    The classical amplitudes commute, so (u u* + u* u)/2 collapses to |u|^2.
    In the reduced geometry the per-unit-length energy carries 1/(2 pi).
    """
    total = sum(s.w * float(np.linalg.norm(s.k)) * abs(s.u) ** 2 for s in spec.samples)
    return total * (2 * math.pi) ** (spec.dims - 3)


@dataclass(frozen=True)
class EnergyReport:
    H_spatial: float
    H_diagonal: float
    ratio: float
    t: float = 0.0
    tail_bound: float = 0.0

    def to_record(self) -> dict:
        return {"H_spatial": self.H_spatial, "H_diagonal": self.H_diagonal, "ratio": self.ratio,
                "t": self.t, "tail_bound": self.tail_bound}


def energy_report(spec: PacketSpectrum, box: Box, resolution: int = 12, t: float = 0.0) -> EnergyReport:
    spatial = field_energy(spec, box, resolution, t)
    diagonal = diagonal_energy(spec)
    ratio = spatial / diagonal if diagonal else math.nan
    return EnergyReport(spatial, diagonal, ratio, t, tail_bound(spec, box, t))


def carrier_wavelength(spec: PacketSpectrum) -> float:
    """2 pi / |k0| of the first band, or of the mean sample wave vector."""
    if spec.bandwidth:
        return 2 * math.pi / float(np.linalg.norm(spec.bandwidth[0]["k0"]))
    mean = np.mean([np.linalg.norm(s.k) for s in spec.samples])
    return 2 * math.pi / float(mean)


def sample_keys(spec: PacketSpectrum) -> Iterable[tuple]:
    return ((s.k, s.side, s.s) for s in spec.samples)
