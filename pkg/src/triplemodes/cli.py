"""Command-line front end.

Exit codes: 0 pass, 1 verification failure, 2 usage or configuration error.
Records are JSON lines (sorted keys, ``schema: 1``) or CSV; output never
contains timings, so equal inputs give equal bytes.
"""
from __future__ import annotations

import argparse
import csv
import enum
import io
import json
import math
import os
import sys
from concurrent.futures import ThreadPoolExecutor
from typing import Callable, Iterable, Sequence

import numpy as np

from .errors import TailTooLarge, TripleModeError
from .expansion import (
    SCHEMA_VERSION,
    Box,
    PacketSpectrum,
    carrier_wavelength,
    energy_report,
    gaussian_packet,
)
from .fields import Axis, GridSpec, boundary_continuity_residual, sample_grid
from .identities import IDENTITY_NAMES, run_suite
from .medium import HalfSpaceMedium, Side, make_kinematics
from .modes import Polarization, TransmissionRule, build_mode
from .orthogonality import DEFAULT_PAIRS_PER_CLASS, PAIR_CLASSES, run_class
from .overlap import (
    OracleWeight,
    RegularizationParams,
    analytic_packet_overlap,
    box_quadrature_oracle,
    packet_norm_scale,
)

SPEED_OF_LIGHT = 299_792_458.0
ENERGY_TOL = 0.02
ORACLE_TOL = 0.01


class UsageError(Exception):
    """Bad flag or config value; maps to exit 2."""

    def __init__(self, message: str, parser: argparse.ArgumentParser | None = None):
        super().__init__(message)
        self.parser = parser


class _Parser(argparse.ArgumentParser):
    # report through main() so injected streams see the message
    def error(self, message):
        raise UsageError(message, self)


# ---------------------------------------------------------------- output


def _plain(value):
    if isinstance(value, dict):
        return {str(k): _plain(v) for k, v in value.items()}
    if isinstance(value, (list, tuple, np.ndarray)):
        return [_plain(v) for v in value]
    if isinstance(value, enum.Enum):
        return value.name if isinstance(value, enum.IntEnum) else value.value
    if isinstance(value, (bool, np.bool_)):
        return bool(value)
    if isinstance(value, (int, np.integer)):
        return int(value)
    if isinstance(value, (complex, np.complexfloating)):
        return [_plain(value.real), _plain(value.imag)]
    if isinstance(value, (float, np.floating)):
        v = float(value)
        return v if math.isfinite(v) else str(v)
    return value


def _flatten(rec: dict, prefix: str = "") -> dict:
    out = {}
    for key, val in rec.items():
        name = f"{prefix}{key}"
        if isinstance(val, dict):
            out.update(_flatten(val, name + "."))
        elif isinstance(val, list) and all(not isinstance(v, (dict, list)) for v in val):
            for j, v in enumerate(val):
                out[f"{name}.{j}"] = v
        elif isinstance(val, list):
            out[name] = json.dumps(val, sort_keys=True)
        else:
            out[name] = val
    return out


class Emitter:
    def __init__(self, command: str, fmt: str, stream):
        self.command = command
        self.fmt = fmt
        self.stream = stream
        self.rows: list[dict] = []

    def emit(self, kind: str, payload: dict) -> None:
        rec = {"schema": SCHEMA_VERSION, "command": self.command, "kind": kind}
        rec.update(_plain(payload))
        if self.fmt == "json-lines":
            self.stream.write(json.dumps(rec, sort_keys=True) + "\n")
        else:
            self.rows.append(_flatten(rec))

    def close(self) -> None:
        if self.fmt != "csv" or not self.rows:
            return
        fields: list[str] = []
        for row in self.rows:
            fields.extend(k for k in row if k not in fields)
        buf = io.StringIO()
        writer = csv.DictWriter(buf, fieldnames=fields, lineterminator="\n")
        writer.writeheader()
        writer.writerows(self.rows)
        self.stream.write(buf.getvalue())


def _threads() -> int:
    raw = os.environ.get("TMX_THREADS", "1")
    try:
        n = int(raw)
    except ValueError:
        raise UsageError(f"TMX_THREADS must be a positive integer, got {raw!r}") from None
    if n < 1:
        raise UsageError(f"TMX_THREADS must be a positive integer, got {raw!r}")
    return n


def _ordered_map(fn: Callable, items: Sequence) -> list:
    """Map preserving input order; parallel when TMX_THREADS > 1."""
    n = _threads()
    if n == 1 or len(items) < 2:
        return [fn(x) for x in items]
    with ThreadPoolExecutor(max_workers=n) as pool:
        return list(pool.map(fn, items))


# ---------------------------------------------------------------- parsing helpers


def _axis(text: str) -> Axis:
    parts = text.split(":")
    try:
        if len(parts) == 1:
            v = float(parts[0])
            return Axis(v, v, 1)
        if len(parts) == 3:
            return Axis(float(parts[0]), float(parts[1]), int(parts[2]))
    except ValueError:
        pass
    raise argparse.ArgumentTypeError(f"expected VALUE or START:STOP:NUM, got {text!r}")


def _floats(text: str) -> list[float]:
    try:
        return [float(v) for v in str(text).split(",") if v.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated numbers, got {text!r}") from None


def _kpar(text) -> tuple[float, float]:
    vals = _floats(text) if isinstance(text, str) else list(np.atleast_1d(text).astype(float))
    if len(vals) == 1:
        return (vals[0], 0.0)
    if len(vals) == 2:
        return (vals[0], vals[1])
    raise argparse.ArgumentTypeError("k_parallel is KX or KX,KY")


def _need(args, *names) -> None:
    missing = [n for n in names if getattr(args, n, None) is None]
    if missing:
        flags = ", ".join("--" + n.replace("_", "-") for n in missing)
        raise UsageError(f"missing required option(s): {flags}")


def _medium(args) -> HalfSpaceMedium:
    _need(args, "n_left")
    return HalfSpaceMedium(args.n_left, args.n_right, args.generalized)


def _omega(args, value: float) -> float:
    return value / SPEED_OF_LIGHT if args.si else value


def _rule(args) -> TransmissionRule:
    return TransmissionRule.LEGACY if getattr(args, "legacy_transmission", False) else TransmissionRule.CONTINUITY


def _mode(args):
    _need(args, "omega", "kpar")
    kin = make_kinematics(_medium(args), _omega(args, args.omega), _kpar(args.kpar), args.side)
    return build_mode(kin, args.pol, args.variant, _rule(args))


def _coeff_record(mode) -> dict:
    kin = mode.kin
    rec = {
        "side": kin.side.value,
        "pol": mode.pol.name,
        "variant": mode.variant.value,
        "rule": mode.rule.value,
        "n_left": kin.medium.n_left,
        "n_right": kin.medium.n_right,
        "omega": kin.omega,
        "k_parallel": list(kin.k_parallel),
        "K_i": kin.K_i,
        "K_t": kin.K_t,
        "X_i": kin.X_i.real,
        "X_t": kin.X_t,
        "evanescent": kin.evanescent,
        "a_r": mode.r_coeff,
        "a_t": mode.t_coeff,
        "abs_a_r": abs(mode.r_coeff),
        "incoming_amplitude": mode.incoming_amplitude,
    }
    if not kin.evanescent:
        # fraction of normal energy flux carried by each outgoing wave
        if mode.pol is Polarization.TE:
            ratio = kin.K_t.real / kin.K_i
        else:
            ratio = kin.X_t.real / kin.X_i.real
        rec["reflectance"] = abs(mode.r_coeff) ** 2
        rec["transmittance"] = ratio * abs(mode.t_coeff) ** 2
    return rec


# ---------------------------------------------------------------- commands


def cmd_coeff(args, out: Emitter) -> int:
    mode = _mode(args)
    rec = _coeff_record(mode)
    rec["continuity_residual"] = boundary_continuity_residual(mode).max()
    out.emit("coefficients", rec)
    return 0


def cmd_sample(args, out: Emitter) -> int:
    mode = _mode(args)
    grid = GridSpec(args.x, args.y, args.z)
    for smp in sample_grid(mode, grid):
        rec = {"x": smp.x[0], "y": smp.x[1], "z": smp.x[2]}
        for name, vec in (("E", smp.E), ("B", smp.B)):
            for c, comp in zip("xyz", vec):
                rec[f"{name}{c}_re"] = comp.real
                rec[f"{name}{c}_im"] = comp.imag
            rec[f"abs_{name}"] = float(np.linalg.norm(vec))
        out.emit("field", rec)
    return 0


def cmd_verify_identities(args, out: Emitter) -> int:
    if args.samples < 1:
        raise UsageError("--samples must be at least 1")
    if args.exact_points < 1:
        raise UsageError("--exact-points must be at least 1")
    names = _select(args.identities, IDENTITY_NAMES, "identity")
    reports = run_suite(args.samples, args.seed, _rule(args), args.exact_points, args.tolerance, names)
    for rep in reports:
        out.emit("identity", rep.to_record())
    ok = all(r.passed for r in reports)
    out.emit("summary", {"passed": ok, "failed": [r.name for r in reports if not r.passed],
                         "rule": _rule(args).value, "seed": args.seed, "samples": args.samples})
    return 0 if ok else 1


def _select(text: str | None, known: Iterable[str], what: str) -> list[str]:
    known = list(known)
    if text is None or text == "all":
        return known
    chosen = [c.strip() for c in text.split(",") if c.strip()]
    bad = [c for c in chosen if c not in known]
    if bad or not chosen:
        raise UsageError(f"unknown {what} name(s): {', '.join(bad) or '(none)'}; known: {', '.join(known)}")
    return chosen


def _params(args) -> RegularizationParams:
    return RegularizationParams(epsilons=tuple(args.eps), extrapolation_order=args.order)


def oracle_cases(box_wavelengths: float, resolution: int = 12, tail_limit: float = 1e-2) -> list[dict]:
    """Packet-level comparisons of box quadrature against mode sums.

    ``tail_limit=math.inf`` lifts the truncation guard, for convergence
    studies in boxes too small to hold the packets.
    """
    medium = HalfSpaceMedium(math.sqrt(2.0))
    n = medium.n_left
    ang = math.radians(30.0)
    k_left = (n * math.sin(ang), 0.0, n * math.cos(ang))
    k_right = (math.sin(ang), 0.0, -math.cos(ang))
    te = gaussian_packet(medium, k_left, "L", "TE")
    tm = gaussian_packet(medium, k_left, "L", "TM")
    right = gaussian_packet(medium, k_right, "R", "TE")
    cases = [
        ("te-self", te, te, OracleWeight.N2_EE, False),
        ("tm-self", tm, tm, OracleWeight.BB, False),
        ("te-self-magnetic", te, te, OracleWeight.BB, False),
        ("te-mixed", te, te, OracleWeight.MIXED, True),
        ("counter-te", te, right, OracleWeight.N2_EE, True),
        ("te-tm", te, tm, OracleWeight.N2_EE, True),
    ]
    box = Box(box_wavelengths * carrier_wavelength(te))
    records = []
    for name, a, b, weight, vanishing in cases:
        numeric = box_quadrature_oracle(a, b, weight, box, resolution, tail_limit)
        analytic = analytic_packet_overlap(a, b, weight)
        if vanishing:
            err = abs(numeric - analytic) / packet_norm_scale(a, b)
        else:
            err = abs(numeric - analytic) / abs(analytic)
        records.append({"case": name, "weight": weight.value, "box_wavelengths": box_wavelengths,
                        "numeric": numeric, "analytic": analytic, "rel_error": err,
                        "tolerance": ORACLE_TOL, "passed": err <= ORACLE_TOL})
    return records


def cmd_verify_orthogonality(args, out: Emitter) -> int:
    if args.list_classes:
        for name in sorted(PAIR_CLASSES):
            out.emit("pair-class", {"name": name})
        return 0
    classes = _select(args.classes, sorted(PAIR_CLASSES), "pair class")
    if args.pairs < 1:
        raise UsageError("--pairs must be at least 1")
    params = _params(args)
    results = _ordered_map(lambda name: run_class(name, args.seed, args.pairs, params), classes)
    ok = True
    for checks in results:
        for check in checks:
            out.emit("overlap", check.to_record())
            ok = ok and check.passed
    if args.oracle:
        if not args.box > 0:
            raise UsageError("--box must be positive")
        try:
            for rec in oracle_cases(args.box, args.resolution):
                out.emit("oracle", rec)
                ok = ok and rec["passed"]
        except TailTooLarge as exc:
            out.emit("error", {"error": "TailTooLarge", "message": str(exc)})
            ok = False
    out.emit("summary", {"passed": ok, "classes": classes, "seed": args.seed, "oracle": bool(args.oracle)})
    return 0 if ok else 1


def _packet(args) -> PacketSpectrum:
    if args.spectrum:
        try:
            with open(args.spectrum, encoding="utf-8") as fh:
                return PacketSpectrum.from_json(fh.read())
        except OSError as exc:
            raise UsageError(f"cannot read spectrum: {exc}") from None
        except (KeyError, TypeError, json.JSONDecodeError) as exc:
            raise UsageError(f"malformed spectrum file: {exc}") from None
    medium = _medium(args)
    side = Side.parse(args.side)
    n_i = medium.indices(side)[0]
    k = n_i * _omega(args, args.omega)
    ang = math.radians(args.angle)
    k0 = (k * math.sin(ang), 0.0, side.sign * k * math.cos(ang))
    return gaussian_packet(medium, k0, side, args.pol, args.bandwidth, args.nodes)


def cmd_energy(args, out: Emitter) -> int:
    spec = _packet(args)
    period = 2 * math.pi / min(m.omega for m in spec.modes)
    box = Box(args.box * carrier_wavelength(spec))
    ok = True
    ratios = []
    for periods in args.periods:
        try:
            rep = energy_report(spec, box, args.resolution, periods * period)
        except TailTooLarge as exc:
            out.emit("error", {"error": "TailTooLarge", "message": str(exc), "periods": periods})
            return 1
        passed = abs(rep.ratio - 1.0) <= ENERGY_TOL
        ok = ok and passed
        ratios.append(rep.ratio)
        rec = rep.to_record()
        rec.update({"periods": periods, "box": box.L, "tolerance": ENERGY_TOL, "passed": passed})
        out.emit("energy", rec)
    out.emit("summary", {"passed": ok, "ratios": ratios, "samples": len(spec.samples)})
    return 0 if ok else 1


def cmd_sweep(args, out: Emitter) -> int:
    _need(args, "omega")
    medium = _medium(args)
    omega = _omega(args, args.omega)
    side = Side.parse(args.side)
    n_i = medium.indices(side)[0]
    pols = [Polarization.parse(p) for p in str(args.pol).split(",")]
    angles = args.angles.values()
    if any(not 0 <= a < 90 for a in angles):
        raise UsageError("sweep angles must lie in [0, 90) degrees")
    jobs = [(pol, float(a)) for pol in pols for a in angles]

    def one(job):
        pol, a = job
        kpar = n_i * omega * math.sin(math.radians(a))
        mode = build_mode(make_kinematics(medium, omega, (kpar, 0.0), side), pol, args.variant, _rule(args))
        rec = _coeff_record(mode)
        rec["angle"] = a
        rec["continuity_residual"] = boundary_continuity_residual(mode).max()
        return rec

    ok = True
    for rec in _ordered_map(one, jobs):
        ok = ok and rec["continuity_residual"] <= args.tolerance
        out.emit("sweep", rec)
    return 0 if ok else 1


# ---------------------------------------------------------------- parser


def _mode_options(p: argparse.ArgumentParser, kpar: bool = True) -> None:
    p.add_argument("--n-left", type=float, help="refractive index for z < 0")
    p.add_argument("--n-right", type=float, default=1.0, help="refractive index for z > 0")
    p.add_argument("--generalized", action="store_true", help="allow n_right > 1 (dense right medium)")
    p.add_argument("--omega", type=float, help="angular frequency (rad/s with --si)")
    if kpar:
        p.add_argument("--kpar", type=str, help="in-plane wave vector KX or KX,KY")
    p.add_argument("--side", choices=("L", "R"), default="L", help="side of the incoming wave")
    p.add_argument("--pol", default="TE", help="TE or TM")
    p.add_argument("--variant", choices=("raw", "normalized"), default="raw")
    p.add_argument("--legacy-transmission", action="store_true",
                   help="use a_t = 2K_t/(K_i+K_t), which breaks tangential continuity")


def build_parser() -> tuple[argparse.ArgumentParser, dict[str, argparse.ArgumentParser]]:
    common = _Parser(add_help=False)
    common.add_argument("--config", help="JSON file of option defaults; explicit flags win")
    common.add_argument("--format", choices=("json-lines", "csv"), default=None)
    common.add_argument("--si", action="store_true", help="omega in rad/s and lengths in metres")

    parser = _Parser(prog="triplemodes", description=__doc__.splitlines()[0])
    subs = parser.add_subparsers(dest="command", required=True)
    table: dict[str, argparse.ArgumentParser] = {}

    p = subs.add_parser("coeff", parents=[common], help="reflection/transmission coefficients")
    _mode_options(p)
    p.set_defaults(handler=cmd_coeff)
    table["coeff"] = p

    p = subs.add_parser("sample", parents=[common], help="fields of one mode on a grid")
    _mode_options(p)
    for ax in "xyz":
        p.add_argument(f"--{ax}", type=_axis, default=Axis(0.0, 0.0, 1), help="VALUE or START:STOP:NUM")
    p.set_defaults(handler=cmd_sample, default_format="csv")
    table["sample"] = p

    p = subs.add_parser("verify-identities", parents=[common], help="algebraic identity suite")
    p.add_argument("--samples", type=int, default=10_000)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--exact-points", type=int, default=16)
    p.add_argument("--tolerance", type=float, default=1e-12)
    p.add_argument("--identities", default=None, help="comma-separated subset")
    p.add_argument("--legacy-transmission", action="store_true",
                   help="run the suite with the continuity-violating a_t")
    p.set_defaults(handler=cmd_verify_identities)
    table["verify-identities"] = p

    p = subs.add_parser("verify-orthogonality", parents=[common], help="overlap matrix of pair classes")
    p.add_argument("--classes", default=None, help="comma-separated pair classes (default all)")
    p.add_argument("--list-classes", action="store_true")
    p.add_argument("--pairs", type=int, default=DEFAULT_PAIRS_PER_CLASS, help="random pairs per class")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--eps", type=_floats, default=list(RegularizationParams().epsilons))
    p.add_argument("--order", type=int, default=RegularizationParams().extrapolation_order)
    p.add_argument("--oracle", action="store_true", help="add packet box-quadrature comparisons")
    p.add_argument("--box", type=float, default=50.0, help="oracle box side in carrier wavelengths")
    p.add_argument("--resolution", type=int, default=12, help="quadrature nodes per wavelength")
    p.set_defaults(handler=cmd_verify_orthogonality)
    table["verify-orthogonality"] = p

    p = subs.add_parser("energy", parents=[common], help="packet field energy against the mode sum")
    _mode_options(p, kpar=False)
    p.add_argument("--angle", type=float, default=30.0, help="incidence angle in degrees")
    p.add_argument("--bandwidth", type=float, default=0.02, help="relative spectral width")
    p.add_argument("--nodes", type=int, default=32, help="spectral nodes per axis")
    p.add_argument("--spectrum", help="PacketSpectrum JSON file instead of a Gaussian")
    p.add_argument("--box", type=float, default=60.0, help="box side in carrier wavelengths")
    p.add_argument("--resolution", type=int, default=12)
    p.add_argument("--periods", type=_floats, default=[0.0], help="times in optical periods")
    p.set_defaults(handler=cmd_energy, omega=1.0)
    table["energy"] = p

    p = subs.add_parser("sweep", parents=[common], help="coefficients over incidence angle")
    _mode_options(p, kpar=False)
    p.add_argument("--angles", type=_axis, default=Axis(0.0, 89.0, 90), help="START:STOP:NUM in degrees")
    p.add_argument("--tolerance", type=float, default=1e-12, help="continuity residual bound")
    p.set_defaults(handler=cmd_sweep)
    table["sweep"] = p
    return parser, table


def _apply_config(parser, sub, argv) -> argparse.Namespace:
    args = parser.parse_args(argv)
    if not args.config:
        return args
    try:
        with open(args.config, encoding="utf-8") as fh:
            cfg = json.load(fh)
    except (OSError, json.JSONDecodeError) as exc:
        raise UsageError(f"cannot read config {args.config}: {exc}") from None
    if not isinstance(cfg, dict):
        raise UsageError("config must be a JSON object")
    cfg = {k.replace("-", "_"): v for k, v in cfg.items()}
    known = {a.dest for a in sub._actions}
    unknown = sorted(set(cfg) - known)
    if unknown:
        raise UsageError(f"unknown config key(s): {', '.join(unknown)}")
    converted = {}
    for action in sub._actions:
        if action.dest in cfg:
            val = cfg[action.dest]
            if action.type is not None and isinstance(val, str):
                val = action.type(val)
            elif action.type in (_floats,) and isinstance(val, (int, float)):
                val = [float(val)]
            converted[action.dest] = val
    sub.set_defaults(**converted)
    return parser.parse_args(argv)


def main(argv: Sequence[str] | None = None, stdout=None, stderr=None) -> int:
    stdout = stdout or sys.stdout
    stderr = stderr or sys.stderr
    argv = list(sys.argv[1:] if argv is None else argv)
    parser, table = build_parser()
    try:
        args = parser.parse_args(argv)
        sub = table[args.command]
        args = _apply_config(parser, sub, argv)
        fmt = args.format or getattr(args, "default_format", "json-lines")
        out = Emitter(args.command, fmt, stdout)
        code = args.handler(args, out)
        out.close()
        return code
    except SystemExit as exc:
        return int(exc.code or 0)
    except (UsageError, argparse.ArgumentTypeError) as exc:
        (getattr(exc, "parser", None) or parser).print_usage(stderr)
        stderr.write(f"triplemodes: error: {exc}\n")
        return 2
    except (TripleModeError, ValueError) as exc:
        stderr.write(f"triplemodes: error: {type(exc).__name__}: {exc}\n")
        return 2
