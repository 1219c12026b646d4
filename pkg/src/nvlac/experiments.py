"""Pulse-sequence simulations on the full 18-level system.

Microwave pulses on the electron 0 <-> +-1 band are computed in the frame
rotating at the carrier, keeping only the co-rotating half of the microwave
drive (amplitudes of a few MHz against a ~2.9 GHz carrier make that error
~1e-3). The low-frequency drive resonant with the anti-crossing pair is the
object under study and is propagated exactly, with no rotating-wave
approximation.

Optical polarization and readout are ideal: the polarized state is the
uniform mixture over the six electron-0 levels, and readout is the trace
against the electron-0 projector.
"""
from __future__ import annotations

import math
import re
import warnings
from dataclasses import dataclass, field

import numpy as np

from .dynamics import DriveParams, propagate
from .errors import InvalidArgumentError
from .operators import embed
from .spectra import EigenSystem, eigensystem, pair_indices, tls_extract
from .system import DIMS, ELECTRON, FieldSpec, SpinSystemParams, build_hamiltonian

# Electron-manifold projectors and the co-rotating microwave coupling.
PROJECTOR_MS0 = embed(np.diag([0.0, 1.0, 0.0]).astype(complex), 0, DIMS)
PROJECTOR_MS1 = embed(np.diag([1.0, 0.0, 1.0]).astype(complex), 0, DIMS)

_raise = np.zeros((3, 3), dtype=complex)
_raise[0, 1] = 1.0   # |+1><0|
_raise[2, 1] = 1.0   # |-1><0|
MW_COUPLING = embed(_raise, 0, DIMS)
del _raise


@dataclass
class ExperimentTrace:
    """Sequence output: sweep axis in microseconds, electron-0 population."""
    axis: np.ndarray
    signal: np.ndarray


@dataclass
class RamseyConfig:
    """Free-evolution sweep settings.

    nu_d is the artificial detuning in MHz, synthesized by ramping the
    second pulse phase as -2 pi nu_d tau. The carrier sits above the upper
    pair transition so the fringes oscillate near nu_d.
    """
    nu_d: float
    flip: float
    tau_grid: np.ndarray
    carrier: float = 2876.6

    def __post_init__(self):
        if self.nu_d < 0:
            raise InvalidArgumentError("nu_d must be non-negative")
        if not 0.0 < self.flip <= 2 * np.pi:
            raise InvalidArgumentError("flip angle must lie in (0, 2 pi]")
        tau = np.asarray(self.tau_grid, dtype=float)
        if tau.ndim != 1 or len(tau) < 2 or not np.all(np.diff(tau) > 0):
            raise InvalidArgumentError("tau_grid must be ascending")
        steps = np.diff(tau)
        if not np.allclose(steps, steps[0], rtol=1e-9, atol=0):
            raise InvalidArgumentError("tau_grid must be uniform")
        self.tau_grid = tau


def polarize() -> np.ndarray:
    """Ideal optical polarization: uniform mixture over the electron-0 levels."""
    return PROJECTOR_MS0 / 6.0


def readout(rho: np.ndarray) -> float:
    """Total electron-0 population of a trace-1 density matrix."""
    rho = np.asarray(rho)
    if abs(np.trace(rho).real - 1.0) > 1e-6 or abs(np.trace(rho).imag) > 1e-6:
        raise InvalidArgumentError("density matrix must have unit trace")
    return float(np.real(np.trace(rho @ PROJECTOR_MS0)))


def number_operator(eig: EigenSystem) -> np.ndarray:
    """Carrier-photon counting operator for the rotating frame.

    Each eigenstate is assigned weight 0 or 1 by rounding its overlap with
    the electron +-1 manifold. Built from eigenvectors, the operator
    commutes with the static Hamiltonian exactly, which keeps free evolution
    diagonal in the rotating frame.
    """
    return (eig.vectors * _manifold_characters(eig)) @ eig.vectors.conj().T


def _manifold_characters(eig: EigenSystem) -> np.ndarray:
    chars = np.real(np.einsum("ik,ij,jk->k", eig.vectors.conj(),
                              PROJECTOR_MS1, eig.vectors))
    return np.round(chars)


def mw_pulse_operator(h_static: np.ndarray, carrier: float, rabi: float,
                      duration: float, phase: float = 0.0,
                      eig: EigenSystem | None = None) -> np.ndarray:
    """Unitary of one microwave pulse in the frame rotating at the carrier.

    The rotating-frame generator is H - carrier * N plus the co-rotating
    coupling (rabi / 2)(exp(-i phase) A + exp(+i phase) A+), where A drives
    0 -> +-1 symmetrically. Pulse unitaries at the same carrier compose
    directly with rotating-frame free evolution.
    """
    if duration < 0:
        raise InvalidArgumentError("duration must be non-negative")
    if rabi >= carrier / 100.0:
        warnings.warn("rabi amplitude within 1%% of the carrier strains the "
                      "co-rotating approximation", stacklevel=2)
    if eig is None:
        eig = eigensystem(h_static)
    n_op = number_operator(eig)
    coupling = (rabi / 2.0) * (np.exp(-1j * phase) * MW_COUPLING
                               + np.exp(1j * phase) * MW_COUPLING.conj().T)
    h_rot = h_static - carrier * n_op + coupling
    w, v = np.linalg.eigh(h_rot)
    return (v * np.exp(-2j * np.pi * w * duration)) @ v.conj().T


def transition_table(eig: EigenSystem, min_moment: float = 0.0):
    """Electron-0 to +-1 transitions: list of (frequency, moment, i0, i1).

    The moment is |<upper| A |lower>|, the factor multiplying the nominal
    rabi amplitude on that transition.
    """
    chars = _manifold_characters(eig)
    ms0 = np.where(chars < 0.5)[0]
    ms1 = np.where(chars > 0.5)[0]
    moments = np.abs(eig.vectors.conj().T @ MW_COUPLING @ eig.vectors)
    table = []
    for i in ms0:
        for f in ms1:
            if moments[f, i] > min_moment:
                table.append((float(eig.values[f] - eig.values[i]),
                              float(moments[f, i]), int(i), int(f)))
    return table


def brightest_pair_transition(eig: EigenSystem, pair):
    """Strongest electron-0 transition into either state of the pair.

    Returns (carrier, moment, i0, i_pair). With a symmetric drive one pair
    partner is nearly dark, so the bright transition picks itself out by two
    orders of magnitude.
    """
    table = [t for t in transition_table(eig) if t[3] in pair]
    if not table:
        raise InvalidArgumentError("pair is not reachable from the electron-0 manifold")
    freq, moment, i0, f0 = max(table, key=lambda t: t[1])
    return freq, moment, i0, f0


def _reference_moment(eig: EigenSystem, carrier: float, floor: float = 0.1) -> float:
    """Moment of the transition nearest the carrier among non-dark lines."""
    table = [t for t in transition_table(eig, min_moment=floor)]
    if not table:
        raise InvalidArgumentError("no transition with moment above %g" % floor)
    freq, moment, _, _ = min(table, key=lambda t: abs(t[0] - carrier))
    return moment


def rabi_experiment(params: SpinSystemParams, fld: FieldSpec, omega1: float,
                    rf_freq: float, rf_phase: float = 0.0, t_grid=None,
                    mode: str = "full-18", mw_rabi: float = 0.25,
                    substep_factor: int = 200) -> ExperimentTrace:
    """Drive the anti-crossing pair and read its population dynamics.

    Sequence per duration t: polarize, selective pi pulse on the brightest
    pair transition, low-frequency drive of amplitude omega1 (MHz) for t,
    second pi pulse, electron-0 readout. The drive field amplitude is
    calibrated so its projection on the pair equals omega1.

    mode "full-18" runs the sequence on the complete system; "tls-2" runs
    the reduced two-level dynamics and maps the population back through the
    ideal sequence (five of six polarized levels are untouched bystanders).
    """
    if rf_freq <= 0:
        raise InvalidArgumentError("rf_freq must be positive")
    if t_grid is None:
        raise InvalidArgumentError("rabi_experiment needs an explicit t_grid")
    t_grid = np.asarray(t_grid, dtype=float)
    if t_grid.ndim != 1 or len(t_grid) < 1 or (len(t_grid) > 1
                                               and not np.all(np.diff(t_grid) > 0)):
        raise InvalidArgumentError("t_grid must be ascending")

    h = build_hamiltonian(params, fld)
    eig = eigensystem(h, check=False)
    pair = pair_indices(eig)
    tls = tls_extract(eig, pair)
    carrier, moment_mw, i0, f0 = brightest_pair_transition(eig, pair)
    bright_is_upper = f0 == pair[1]

    if mode == "tls-2":
        drive = DriveParams(omega0=tls.omega0, omega1=omega1, omega=rf_freq,
                            phase_d=rf_phase)
        traj = propagate(drive, _tls_initial(bright_is_upper), t_grid,
                         substep_factor=substep_factor)
        amp = traj.states @ _tls_initial(bright_is_upper).conj()
        signal = 5.0 / 6.0 + np.abs(amp) ** 2 / 6.0
        return ExperimentTrace(axis=t_grid, signal=signal)
    if mode != "full-18":
        raise InvalidArgumentError("mode must be 'full-18' or 'tls-2'")

    t_pi = 1.0 / (2.0 * mw_rabi * moment_mw)
    u_pi = mw_pulse_operator(h, carrier, mw_rabi, t_pi, eig=eig)
    # drive field amplitude calibrated through the pair moment
    drive_op = (omega1 / tls.moment) * ELECTRON[2]
    dt_max = 1.0 / (substep_factor * max(tls.omega0, omega1, rf_freq))
    rho = u_pi @ polarize() @ u_pi.conj().T
    signal = np.empty(len(t_grid))
    for k, t in enumerate(t_grid):
        rho_read = u_pi @ rho @ u_pi.conj().T
        signal[k] = np.real(np.trace(rho_read @ PROJECTOR_MS0))
        if k + 1 < len(t_grid):
            dt_step = t_grid[k + 1] - t_grid[k]
            nsub = max(1, int(math.ceil(dt_step / dt_max)))
            dt = dt_step / nsub
            for s in range(nsub):
                tm = t + (s + 0.5) * dt
                drive = np.cos(2 * np.pi * rf_freq * tm + rf_phase)
                w, v = np.linalg.eigh(h + drive * drive_op)
                u = (v * np.exp(-2j * np.pi * w * dt)) @ v.conj().T
                rho = u @ rho @ u.conj().T
    return ExperimentTrace(axis=t_grid, signal=signal)


def _tls_initial(bright_is_upper: bool) -> np.ndarray:
    # the pi pulse populates one energy eigenstate of the pair: |+x> when
    # the bright partner is the upper level, |-x> otherwise
    sign = 1.0 if bright_is_upper else -1.0
    return np.array([1.0, sign], dtype=complex) / np.sqrt(2)


def ramsey_experiment(params: SpinSystemParams, fld: FieldSpec,
                      config: RamseyConfig, mw_rabi: float = 25.0) -> ExperimentTrace:
    """Two-pulse free-evolution sweep with artificial detuning.

    Per delay tau: polarize, pulse(flip, phase 0), free evolution tau in
    the carrier rotating frame, pulse(flip, phase -2 pi nu_d tau), readout.
    The flip angle is calibrated on the non-dark transition nearest the
    carrier. Free evolution keeps electron 0 <-> +-1 coherences precessing
    at their carrier-detuned frequencies while same-manifold coherences
    evolve at their true frequencies, which is what pins the positions of
    the pair and other same-manifold lines under detuning changes.
    """
    h = build_hamiltonian(params, fld)
    eig = eigensystem(h, check=False)
    m_ref = _reference_moment(eig, config.carrier)
    duration = config.flip / (2 * np.pi * mw_rabi * m_ref)
    u1 = mw_pulse_operator(h, config.carrier, mw_rabi, duration, eig=eig)

    chars = _manifold_characters(eig)
    vectors = eig.vectors
    pulse = vectors.conj().T @ u1 @ vectors              # pulse in the eigenbasis
    rho0 = vectors.conj().T @ polarize() @ vectors
    proj0 = vectors.conj().T @ PROJECTOR_MS0 @ vectors
    detuned = eig.values - config.carrier * chars        # rotating-frame energies

    taus = config.tau_grid
    signal = np.empty(len(taus))
    for k, tau in enumerate(taus):
        free = np.exp(-2j * np.pi * detuned * tau)
        ramp = np.exp(2j * np.pi * config.nu_d * tau * chars)
        second = (ramp[:, None] * pulse) * ramp.conj()[None, :]
        total = second @ (free[:, None] * pulse)
        rho = total @ rho0 @ total.conj().T
        signal[k] = np.real(np.trace(rho @ proj0))
    return ExperimentTrace(axis=taus, signal=signal)


# --- plain-text pulse schedules -------------------------------------------

@dataclass
class LaserPulse:
    pass


@dataclass
class MwPulse:
    carrier: float
    flip: float
    phase: float = 0.0
    rabi: float = 25.0


@dataclass
class RfPulse:
    freq: float
    amp: float
    dur: float
    phase: float = 0.0


@dataclass
class Delay:
    dur: float


@dataclass
class Readout:
    pass


@dataclass
class PulseSequence:
    """Ordered schedule elements; starts with laser, ends with read."""
    elements: list = field(default_factory=list)

    def __post_init__(self):
        if not self.elements:
            raise InvalidArgumentError("sequence is empty")
        if not isinstance(self.elements[0], LaserPulse):
            raise InvalidArgumentError("sequence must begin with a laser element")
        if not isinstance(self.elements[-1], Readout):
            raise InvalidArgumentError("sequence must end with a read element")


_NUMBER = re.compile(r"^[-+]?(\d+\.?\d*|\.\d+)([eE][-+]?\d+)?$")


def _parse_value(token: str, subs: dict | None):
    """Numeric field: plain float, '<x>pi' multiples, or a <name> placeholder."""
    if token.startswith("<") and token.endswith(">"):
        name = token[1:-1]
        if subs is None or name not in subs:
            raise InvalidArgumentError("unbound placeholder <%s>" % name)
        return float(subs[name])
    if token.endswith("pi"):
        head = token[:-2]
        factor = 1.0 if head in ("", "+") else (-1.0 if head == "-" else float(head))
        return factor * np.pi
    if not _NUMBER.match(token):
        raise InvalidArgumentError("cannot parse numeric value %r" % token)
    return float(token)


def parse_angle(text) -> float:
    """Angle in radians from a float or a 'pi' multiple like '0.5pi'."""
    if isinstance(text, (int, float)):
        return float(text)
    return float(_parse_value(text.strip(), None))


def parse_sequence(text: str, subs: dict | None = None) -> PulseSequence:
    """Parse the plain-text schedule format.

    One element per line: `laser`, `mw carrier=<MHz> flip=<rad|x*pi>
    phase=<rad> [rabi=<MHz>]`, `rf freq=<MHz> amp=<MHz> dur=<us>
    phase=<rad>`, `delay dur=<us>`, `read`. Blank lines and lines starting
    with '#' are skipped. Numeric fields may be `<name>` placeholders bound
    through `subs`.
    """
    elements = []
    for raw in text.splitlines():
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        parts = line.split()
        kind, kv = parts[0], {}
        for item in parts[1:]:
            if "=" not in item:
                raise InvalidArgumentError("expected key=value, got %r" % item)
            key, val = item.split("=", 1)
            kv[key] = _parse_value(val, subs)
        try:
            if kind == "laser":
                elements.append(LaserPulse())
            elif kind == "mw":
                elements.append(MwPulse(carrier=kv.pop("carrier"),
                                        flip=kv.pop("flip"),
                                        phase=kv.pop("phase", 0.0),
                                        rabi=kv.pop("rabi", 25.0)))
            elif kind == "rf":
                elements.append(RfPulse(freq=kv.pop("freq"), amp=kv.pop("amp"),
                                        dur=kv.pop("dur"),
                                        phase=kv.pop("phase", 0.0)))
            elif kind == "delay":
                elements.append(Delay(dur=kv.pop("dur")))
            elif kind == "read":
                elements.append(Readout())
            else:
                raise InvalidArgumentError("unknown schedule element %r" % kind)
        except KeyError as exc:
            raise InvalidArgumentError("%s element is missing key %s"
                                       % (kind, exc)) from None
        if kv:
            raise InvalidArgumentError("unexpected keys for %s: %s"
                                       % (kind, ", ".join(sorted(kv))))
    seq = PulseSequence(elements=elements)
    for el in elements:
        if isinstance(el, (RfPulse, Delay)) and el.dur < 0:
            raise InvalidArgumentError("durations must be non-negative")
        if isinstance(el, MwPulse) and not 0.0 < el.flip <= 2 * np.pi:
            raise InvalidArgumentError("flip angle must lie in (0, 2 pi]")
    return seq


def run_sequence(params: SpinSystemParams, fld: FieldSpec, seq: PulseSequence,
                 substep_factor: int = 200):
    """Execute a schedule; returns the list of readout values.

    Delays evolve in the rotating frame of the most recent mw carrier (lab
    frame before any pulse). The rf element applies amp * cos(2 pi freq t +
    phase) on the electron z operator with an element-local clock, and the
    mw flip angle is calibrated on the non-dark transition nearest its
    carrier.
    """
    h = build_hamiltonian(params, fld)
    eig = eigensystem(h, check=False)
    chars = _manifold_characters(eig)
    rho = None
    carrier = 0.0
    outputs = []
    for el in seq.elements:
        if isinstance(el, LaserPulse):
            rho = polarize()
        elif rho is None:
            raise InvalidArgumentError("sequence used a state before polarizing")
        elif isinstance(el, MwPulse):
            m_ref = _reference_moment(eig, el.carrier)
            duration = el.flip / (2 * np.pi * el.rabi * m_ref)
            u = mw_pulse_operator(h, el.carrier, el.rabi, duration,
                                  phase=el.phase, eig=eig)
            rho = u @ rho @ u.conj().T
            carrier = el.carrier
        elif isinstance(el, Delay):
            if el.dur > 0:
                detuned = eig.values - carrier * chars
                u = (eig.vectors * np.exp(-2j * np.pi * detuned * el.dur)) \
                    @ eig.vectors.conj().T
                rho = u @ rho @ u.conj().T
        elif isinstance(el, RfPulse):
            if el.freq <= 0:
                raise InvalidArgumentError("rf freq must be positive")
            if el.dur > 0:
                drive_op = el.amp * ELECTRON[2]
                dt_max = 1.0 / (substep_factor * max(el.freq, el.amp, 1e-9))
                nsub = max(1, int(math.ceil(el.dur / dt_max)))
                dt = el.dur / nsub
                for s in range(nsub):
                    tm = (s + 0.5) * dt
                    c = np.cos(2 * np.pi * el.freq * tm + el.phase)
                    w, v = np.linalg.eigh(h + c * drive_op)
                    u = (v * np.exp(-2j * np.pi * w * dt)) @ v.conj().T
                    rho = u @ rho @ u.conj().T
        elif isinstance(el, Readout):
            outputs.append(readout(rho))
    return outputs
