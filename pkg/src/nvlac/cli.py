"""Command-line workflows that bind the library into reproducible runs.

Every subcommand reads an optional key-value config file, applies flag
overrides, and writes plot-ready CSV with '#' metadata headers. Outputs are
deterministic: identical config and seed give byte-identical files.

Exit codes: 0 success, 1 usage or argument error, 2 numerical failure
(no anti-crossing found, eigensolver breakdown), 3 I/O error.
"""
from __future__ import annotations

import argparse
import sys
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .dynamics import (DriveParams, KET_PLUS_X, bloch_coords, phase_average,
                       propagate, rotating_frame)
from .errors import InvalidArgumentError, NotFoundError
from .experiments import (RamseyConfig, brightest_pair_transition,
                          parse_angle, parse_sequence, rabi_experiment,
                          ramsey_experiment, run_sequence)
from .fourier import TimeTrace, dft, find_peaks, normalize_axis
from .spectra import (eigensystem, find_lac, pair_indices,
                      reference_pair_states, track_levels, tls_extract)
from .system import (DIM, FieldSpec, SpinSystemParams, build_hamiltonian,
                     params_from_items, params_to_items)

_FIELD_KEYS = ("B", "theta", "phi")
_DRIVE_KEYS = ("omega0", "omega1", "omega", "phase")


@dataclass
class RunContext:
    """Fully resolved settings for one command invocation."""
    params: SpinSystemParams
    fld: FieldSpec
    drive: dict
    seed: int
    threads: int
    out_dir: Path


def read_config(path) -> dict:
    """Parse the flat `key = value` config format; '#' starts a comment."""
    items = {}
    with open(path) as fh:
        for lineno, raw in enumerate(fh, start=1):
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            if "=" not in line:
                raise InvalidArgumentError(
                    "%s:%d: expected key = value" % (path, lineno))
            key, value = (part.strip() for part in line.split("=", 1))
            items[key] = value
    return items


def resolve_context(args) -> RunContext:
    cfg = read_config(args.config) if args.config else {}

    system_items, field_items, drive_items = {}, {}, {}
    seed = 12345
    for key, value in cfg.items():
        if key.startswith("system."):
            system_items[key[len("system."):]] = float(value)
        elif key.startswith("field."):
            name = key[len("field."):]
            if name not in _FIELD_KEYS:
                raise InvalidArgumentError("unknown config key %r" % key)
            field_items[name] = float(value)
        elif key.startswith("drive."):
            name = key[len("drive."):]
            if name not in _DRIVE_KEYS:
                raise InvalidArgumentError("unknown config key %r" % key)
            drive_items[name] = float(value)
        elif key == "seed":
            seed = int(value)
        else:
            raise InvalidArgumentError("unknown config key %r" % key)

    params = params_from_items(system_items)
    fld = FieldSpec(b=field_items.get("B", 28.9),
                    theta=field_items.get("theta", 38.4),
                    phi=field_items.get("phi", 0.0))
    drive = {"omega0": 1.7, "omega1": 0.23, "omega": 1.7, "phase": 0.0}
    drive.update(drive_items)

    if getattr(args, "seed", None) is not None:
        seed = args.seed
    threads = getattr(args, "threads", None) or 1
    if threads < 1:
        raise InvalidArgumentError("--threads must be at least 1")
    out_dir = Path(getattr(args, "out_dir", None) or ".")
    out_dir.mkdir(parents=True, exist_ok=True)
    return RunContext(params=params, fld=fld, drive=drive, seed=seed,
                      threads=threads, out_dir=out_dir)


def _fmt(x) -> str:
    return format(float(x), ".12g")


def _header_lines(command: str, ctx: RunContext, extra: dict) -> list:
    lines = ["nvlac %s" % command]
    for key, value in params_to_items(ctx.params).items():
        lines.append("system.%s = %s" % (key, _fmt(value)))
    lines.append("field.B = %s" % _fmt(ctx.fld.b))
    lines.append("field.theta = %s" % _fmt(ctx.fld.theta))
    lines.append("field.phi = %s" % _fmt(ctx.fld.phi))
    for key, value in extra.items():
        lines.append("%s = %s" % (key, value if isinstance(value, str)
                                  else _fmt(value)))
    lines.append("seed = %d" % ctx.seed)
    return lines


def write_csv(path: Path, names, columns, header_lines) -> None:
    """Deterministic CSV: '#' metadata, one header row, .12g floats."""
    columns = [np.asarray(col) for col in columns]
    with open(path, "w") as fh:
        for line in header_lines:
            fh.write("# %s\n" % line)
        fh.write(",".join(names) + "\n")
        for row in zip(*columns):
            fh.write(",".join(value if isinstance(value, str) else _fmt(value)
                              for value in row) + "\n")


# --- subcommands -----------------------------------------------------------

def cmd_levels(args) -> int:
    ctx = resolve_context(args)
    if args.samples < 1:
        raise InvalidArgumentError("--samples must be at least 1")
    if args.theta_min > args.theta_max:
        raise InvalidArgumentError("--theta-min must not exceed --theta-max")
    if args.samples == 1:
        grid = np.array([args.theta_min])
    else:
        if args.theta_min == args.theta_max:
            raise InvalidArgumentError("degenerate theta range needs --samples 1")
        grid = np.linspace(args.theta_min, args.theta_max, args.samples)
    n_tracks = args.tracks
    if not 1 <= n_tracks <= DIM:
        raise InvalidArgumentError("--tracks must lie in [1, %d]" % DIM)
    subset = np.arange(DIM - n_tracks, DIM)

    curves = track_levels(ctx.params, ctx.fld.b, ctx.fld.phi, grid, subset)
    data = curves.curves
    if not args.absolute:
        data = data - data.mean(axis=0, keepdims=True)
    names = ["theta_deg"] + ["track_%02d" % idx for idx in subset]
    header = _header_lines("levels", ctx, {
        "theta_min": args.theta_min, "theta_max": args.theta_max,
        "samples": args.samples, "tracks": n_tracks,
        "energy_reference": "absolute" if args.absolute else "subset-mean",
    })
    path = ctx.out_dir / "levels.csv"
    write_csv(path, names, [grid] + list(data), header)
    print("wrote %s (%d angles, %d tracks)" % (path, len(grid), n_tracks))
    return 0


def cmd_lac(args) -> int:
    ctx = resolve_context(args)
    tls = find_lac(ctx.params, ctx.fld.b, ctx.fld.phi,
                   (args.theta_min, args.theta_max))
    refs = reference_pair_states()
    overlap1 = max(abs(np.vdot(r, tls.psi1)) ** 2 for r in refs)
    overlap2 = max(abs(np.vdot(r, tls.psi2)) ** 2 for r in refs)
    condition = 2.0 * ctx.params.gamma_e * ctx.fld.b \
        * np.cos(np.deg2rad(tls.theta_star))
    print("theta_star_deg = %s" % _fmt(tls.theta_star))
    print("omega0_mhz = %s" % _fmt(tls.omega0))
    print("moment = %s" % _fmt(tls.moment))
    print("overlap_psi1 = %s" % _fmt(overlap1))
    print("overlap_psi2 = %s" % _fmt(overlap2))
    print("zeeman_condition_mhz = %s" % _fmt(condition))
    return 0


def cmd_bloch(args) -> int:
    ctx = resolve_context(args)
    if args.omega1 < 0:
        raise InvalidArgumentError("--omega1 must be non-negative")
    if args.duration <= 0 or args.samples < 2:
        raise InvalidArgumentError("need a positive duration and >= 2 samples")
    drive = DriveParams(omega0=ctx.drive["omega0"], omega1=args.omega1,
                        omega=ctx.drive["omega"], phase_d=args.phase)
    t_grid = np.linspace(0.0, args.duration, args.samples)
    traj = propagate(drive, KET_PLUS_X, t_grid)
    if args.frame == "rotating":
        traj = rotating_frame(traj, drive.omega)
    trace = bloch_coords(traj)
    header = _header_lines("bloch", ctx, {
        "drive.omega0": drive.omega0, "drive.omega": drive.omega,
        "drive.omega1": drive.omega1, "drive.phase": drive.phase_d,
        "duration_us": args.duration, "samples": args.samples,
        "frame": args.frame,
    })
    path = ctx.out_dir / "bloch.csv"
    write_csv(path, ["time_us", "x", "y", "z"],
              [trace.times, trace.xyz[:, 0], trace.xyz[:, 1], trace.xyz[:, 2]],
              header)
    print("wrote %s (%d samples, %s frame)" % (path, args.samples, args.frame))
    return 0


def _rabi_single(ctx: RunContext, args, omega1: float, t_grid: np.ndarray):
    """One amplitude of the rabi sweep; returns the summary line."""
    rf_freq = args.rf_freq if args.rf_freq is not None else ctx.drive["omega"]
    if args.phase_average is not None:
        # vectorized phase ensemble on the reduced pair dynamics
        h = build_hamiltonian(ctx.params, ctx.fld)
        eig = eigensystem(h, check=False)
        pair = pair_indices(eig)
        tls = tls_extract(eig, pair)
        _, _, _, f0 = brightest_pair_transition(eig, pair)
        sign = 1.0 if f0 == pair[1] else -1.0
        initial = np.array([1.0, sign], dtype=complex) / np.sqrt(2)

        def population(states, times):
            return np.abs(states @ initial.conj()) ** 2

        drive = DriveParams(omega0=tls.omega0, omega1=omega1, omega=rf_freq)
        averaged = phase_average(drive, args.phase_average, seed=ctx.seed,
                                 t_grid=t_grid, signal_fn=population,
                                 initial=initial)
        signal = 5.0 / 6.0 + averaged.samples / 6.0
        phase_note = "average(%d)" % args.phase_average
    else:
        trace = rabi_experiment(ctx.params, ctx.fld, omega1, rf_freq,
                                rf_phase=args.phase, t_grid=t_grid,
                                mode=args.mode)
        signal = trace.signal
        phase_note = "fixed(%s)" % _fmt(args.phase)

    dt = float(t_grid[1] - t_grid[0])
    trace = TimeTrace(dt=dt, samples=signal)
    spectrum = dft(trace, window="none", zero_pad_factor=4)
    peaks = find_peaks(dft(trace, window="hann", zero_pad_factor=4),
                       rel_threshold=0.2)
    if omega1 > 0:
        spectrum = normalize_axis(spectrum, omega1)
        axis_name = "frequency_over_omega1"
        peak_freqs = [p.frequency / omega1 for p in peaks]
    else:
        axis_name = "frequency_mhz"
        peak_freqs = [p.frequency for p in peaks]

    extra = {"mode": args.mode, "rf_freq_mhz": rf_freq, "omega1_mhz": omega1,
             "duration_us": args.duration, "samples": args.samples,
             "phase_mode": phase_note}
    tag = format(omega1, "g")
    base = ctx.out_dir / ("rabi_w%s.csv" % tag)
    write_csv(base, ["time_us", "signal"], [t_grid, signal],
              _header_lines("rabi", ctx, extra))
    write_csv(ctx.out_dir / ("rabi_w%s_spectrum.csv" % tag),
              [axis_name, "amplitude", "phase_rad"],
              [spectrum.freqs, spectrum.amplitudes, spectrum.phase],
              _header_lines("rabi", ctx, {**extra, "window": "none"}))
    write_csv(ctx.out_dir / ("rabi_w%s_peaks.csv" % tag),
              [axis_name, "amplitude"],
              [np.array(peak_freqs), np.array([p.amplitude for p in peaks])],
              _header_lines("rabi", ctx, {**extra, "window": "hann"}))
    return "wrote %s (+spectrum, %d peaks)" % (base, len(peaks))


def cmd_rabi(args) -> int:
    ctx = resolve_context(args)
    try:
        omega1_list = [float(tok) for tok in args.omega1.split(",") if tok.strip()]
    except ValueError:
        raise InvalidArgumentError("--omega1 expects a comma-separated float list")
    if not omega1_list:
        raise InvalidArgumentError("--omega1 list is empty")
    if any(w < 0 for w in omega1_list):
        raise InvalidArgumentError("drive amplitudes must be non-negative")
    if args.phase_average is not None and args.phase_average < 1:
        raise InvalidArgumentError("--phase-average needs at least one phase")
    if args.phase_average is not None and args.mode != "tls-2":
        raise InvalidArgumentError("phase averaging is only available in tls-2 mode")
    if args.duration <= 0 or args.samples < 8:
        raise InvalidArgumentError("need a positive duration and >= 8 samples")
    # endpoint-free grid keeps dt = duration / samples exact
    t_grid = np.arange(args.samples) * (args.duration / args.samples)

    if ctx.threads > 1 and len(omega1_list) > 1:
        with ThreadPoolExecutor(max_workers=min(ctx.threads,
                                                len(omega1_list))) as pool:
            futures = [pool.submit(_rabi_single, ctx, args, w, t_grid)
                       for w in omega1_list]
            summaries = [f.result() for f in futures]
    else:
        summaries = [_rabi_single(ctx, args, w, t_grid) for w in omega1_list]
    for line in summaries:
        print(line)
    return 0


def cmd_ramsey(args) -> int:
    ctx = resolve_context(args)
    if args.samples < 2 or args.dt <= 0:
        raise InvalidArgumentError("need >= 2 samples and a positive --dt")
    tau_grid = np.arange(args.samples) * args.dt
    config = RamseyConfig(nu_d=args.nu_d, flip=parse_angle(args.flip),
                          tau_grid=tau_grid, carrier=args.carrier)
    trace = ramsey_experiment(ctx.params, ctx.fld, config,
                              mw_rabi=args.mw_rabi)

    spectrum = dft(TimeTrace(dt=args.dt, samples=trace.signal),
                   window="hann", zero_pad_factor=4)
    peaks = find_peaks(spectrum, rel_threshold=0.05)
    kinds = ["zq" if p.frequency < args.nu_d / 2 else "sq" for p in peaks]

    extra = {"nu_d_mhz": args.nu_d, "flip_rad": parse_angle(args.flip),
             "carrier_mhz": args.carrier, "mw_rabi_mhz": args.mw_rabi,
             "dt_us": args.dt, "samples": args.samples}
    path = ctx.out_dir / "ramsey.csv"
    write_csv(path, ["tau_us", "signal"], [trace.axis, trace.signal],
              _header_lines("ramsey", ctx, extra))
    write_csv(ctx.out_dir / "ramsey_spectrum.csv",
              ["frequency_mhz", "amplitude", "phase_rad"],
              [spectrum.freqs, spectrum.amplitudes, spectrum.phase],
              _header_lines("ramsey", ctx, {**extra, "window": "hann"}))
    write_csv(ctx.out_dir / "ramsey_peaks.csv",
              ["frequency_mhz", "amplitude", "kind"],
              [np.array([p.frequency for p in peaks]),
               np.array([p.amplitude for p in peaks]), kinds],
              _header_lines("ramsey", ctx, {**extra, "window": "hann"}))
    print("wrote %s (+spectrum, %d peaks: %d zq, %d sq)"
          % (path, len(peaks), kinds.count("zq"), kinds.count("sq")))
    return 0


def _parse_sweep(text: str):
    name, _, span = text.partition("=")
    parts = span.split(":")
    if not name or len(parts) != 3:
        raise InvalidArgumentError("--sweep expects name=start:stop:samples")
    start, stop = float(parts[0]), float(parts[1])
    samples = int(parts[2])
    if samples < 1:
        raise InvalidArgumentError("sweep needs at least one sample")
    values = np.array([start]) if samples == 1 \
        else np.linspace(start, stop, samples)
    return name, values


def cmd_sequence(args) -> int:
    ctx = resolve_context(args)
    with open(args.schedule) as fh:
        text = fh.read()
    subs = {}
    for binding in args.set or []:
        key, _, value = binding.partition("=")
        if not key or not value:
            raise InvalidArgumentError("--set expects name=value")
        subs[key] = float(value)

    if args.sweep:
        name, values = _parse_sweep(args.sweep)

        def run_one(value):
            seq = parse_sequence(text, {**subs, name: value})
            return run_sequence(ctx.params, ctx.fld, seq)

        if ctx.threads > 1 and len(values) > 1:
            with ThreadPoolExecutor(max_workers=min(ctx.threads,
                                                    len(values))) as pool:
                outputs = list(pool.map(run_one, values))
        else:
            outputs = [run_one(v) for v in values]
        axis_name, axis = name, values
    else:
        outputs = [run_sequence(ctx.params, ctx.fld,
                                parse_sequence(text, subs))]
        axis_name, axis = "index", np.array([0.0])

    n_reads = len(outputs[0])
    names = [axis_name] + ["read_%02d" % k for k in range(n_reads)]
    columns = [axis] + [np.array([out[k] for out in outputs])
                        for k in range(n_reads)]
    header = _header_lines("sequence", ctx, {
        "schedule": Path(args.schedule).name,
        **{"set.%s" % key: value for key, value in sorted(subs.items())},
        **({"sweep": args.sweep} if args.sweep else {}),
    })
    path = ctx.out_dir / "sequence.csv"
    write_csv(path, names, columns, header)
    print("wrote %s (%d runs, %d readouts each)" % (path, len(axis), n_reads))
    return 0


# --- parser and entry point ------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", help="key = value settings file")
    common.add_argument("--out-dir", help="output directory (default: .)")
    common.add_argument("--seed", type=int, help="phase-sampling seed")
    common.add_argument("--threads", type=int, help="parallel sweep workers")

    parser = argparse.ArgumentParser(
        prog="nvlac",
        description="Spin-level anti-crossing dynamics: level sweeps, "
                    "driven two-level dynamics, and pulse-sequence runs.")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("levels", parents=[common],
                       help="track level curves over a field-angle sweep")
    p.add_argument("--theta-min", type=float, default=30.0)
    p.add_argument("--theta-max", type=float, default=46.0)
    p.add_argument("--samples", type=int, default=161)
    p.add_argument("--tracks", type=int, default=12,
                   help="track the N highest levels (default 12)")
    p.add_argument("--absolute", action="store_true",
                   help="export absolute energies, not subset-mean-relative")
    p.set_defaults(func=cmd_levels)

    p = sub.add_parser("lac", parents=[common],
                       help="locate the anti-crossing and report the pair")
    p.add_argument("--theta-min", type=float, default=35.0)
    p.add_argument("--theta-max", type=float, default=42.0)
    p.set_defaults(func=cmd_lac)

    p = sub.add_parser("bloch", parents=[common],
                       help="driven two-level Bloch trajectory")
    p.add_argument("--omega1", type=float, default=0.10,
                   help="drive amplitude, MHz")
    p.add_argument("--duration", type=float, default=5.0, help="microseconds")
    p.add_argument("--samples", type=int, default=251)
    p.add_argument("--phase", type=float, default=0.0, help="drive phase, rad")
    p.add_argument("--frame", choices=("lab", "rotating"), default="rotating")
    p.set_defaults(func=cmd_bloch)

    p = sub.add_parser("rabi", parents=[common],
                       help="pair population dynamics under resonant drive")
    p.add_argument("--omega1", default="0.23,1.6,2.35,3.62",
                   help="comma-separated amplitudes, MHz")
    p.add_argument("--mode", choices=("tls-2", "full-18"), default="tls-2")
    p.add_argument("--rf-freq", type=float, help="drive frequency, MHz "
                   "(default: drive.omega from config)")
    p.add_argument("--phase", type=float, default=0.0, help="drive phase, rad")
    p.add_argument("--phase-average", type=int, metavar="N",
                   help="average N seeded random drive phases")
    p.add_argument("--duration", type=float, default=40.96, help="microseconds")
    p.add_argument("--samples", type=int, default=2048)
    p.set_defaults(func=cmd_rabi)

    p = sub.add_parser("ramsey", parents=[common],
                       help="two-pulse fringes with artificial detuning")
    p.add_argument("--nu-d", type=float, default=20.0,
                   help="artificial detuning, MHz")
    p.add_argument("--flip", default="0.5pi",
                   help="pulse flip angle: rad or multiples like 0.5pi")
    p.add_argument("--carrier", type=float, default=2876.6, help="MHz")
    p.add_argument("--mw-rabi", type=float, default=25.0,
                   help="microwave amplitude, MHz")
    p.add_argument("--dt", type=float, default=0.01,
                   help="delay increment, microseconds")
    p.add_argument("--samples", type=int, default=2000)
    p.set_defaults(func=cmd_ramsey)

    p = sub.add_parser("sequence", parents=[common],
                       help="run a plain-text pulse schedule")
    p.add_argument("--schedule", required=True, help="schedule file path")
    p.add_argument("--sweep", help="name=start:stop:samples placeholder sweep")
    p.add_argument("--set", action="append", metavar="NAME=VALUE",
                   help="bind a schedule placeholder (repeatable)")
    p.set_defaults(func=cmd_sequence)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return 0 if exc.code in (0, None) else 1
    try:
        return args.func(args)
    except InvalidArgumentError as exc:
        print("error: %s" % exc, file=sys.stderr)
        return 1
    except (NotFoundError, np.linalg.LinAlgError) as exc:
        print("error: %s" % exc, file=sys.stderr)
        return 2
    except OSError as exc:
        print("error: %s" % exc, file=sys.stderr)
        return 3


if __name__ == "__main__":
    sys.exit(main())
