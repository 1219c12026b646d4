"""Exact time-domain propagation of a driven two-level system and of generic
time-dependent Hamiltonians, rotating-frame transforms, Bloch coordinates,
and seeded drive-phase averaging.

The two-level Hamiltonian is

    H(t) = (omega0 / 2) sigma_x + omega1 cos(2 pi omega t + phase_d) sigma_z

in MHz, so the undriven eigenstates are |+x> and |-x> and the drive couples
them through sigma_z. No rotating-wave approximation is made anywhere in
this module; the propagator resolves the full cosine.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import InvalidArgumentError, InvalidStateError
from .fourier import TimeTrace
from .operators import is_hermitian

SIGMA_X = np.array([[0, 1], [1, 0]], dtype=complex)
SIGMA_Y = np.array([[0, -1j], [1j, 0]], dtype=complex)
SIGMA_Z = np.array([[1, 0], [0, -1]], dtype=complex)
KET_PLUS_X = np.array([1, 1], dtype=complex) / np.sqrt(2)
KET_MINUS_X = np.array([1, -1], dtype=complex) / np.sqrt(2)


@dataclass(frozen=True)
class DriveParams:
    """Two-level drive description, all frequencies in MHz, phase in radians."""
    omega0: float
    omega1: float
    omega: float
    phase_d: float = 0.0

    def __post_init__(self):
        if self.omega0 <= 0:
            raise InvalidArgumentError("omega0 must be positive")
        if self.omega1 < 0:
            raise InvalidArgumentError("omega1 must be non-negative")
        if self.omega <= 0:
            raise InvalidArgumentError("omega must be positive")


@dataclass
class StateTrajectory:
    """States sampled on a uniform time grid (microseconds)."""
    times: np.ndarray
    states: np.ndarray          # (n_times, dim) pure states
    frame: str = "lab"


@dataclass
class BlochTrace:
    """Expectation values (<sigma_x>, <sigma_y>, <sigma_z>) per sample."""
    times: np.ndarray
    xyz: np.ndarray             # (n_times, 3)


def tls_hamiltonian(drive: DriveParams, t: float) -> np.ndarray:
    """Instantaneous two-level Hamiltonian at time t."""
    az = drive.omega1 * np.cos(2 * np.pi * drive.omega * t + drive.phase_d)
    return 0.5 * drive.omega0 * SIGMA_X + az * SIGMA_Z


def corotating_components(drive: DriveParams, t: float):
    """Split the linear drive into co- and counter-rotating halves.

    Each half has constant operator magnitude omega1 / 2 and their sum
    reconstructs the full cosine drive term exactly.
    """
    arg = 2 * np.pi * drive.omega * t + drive.phase_d
    half = 0.5 * drive.omega1
    co = half * (np.cos(arg) * SIGMA_Z - np.sin(arg) * SIGMA_Y)
    counter = half * (np.cos(arg) * SIGMA_Z + np.sin(arg) * SIGMA_Y)
    return co, counter


def step_propagator(h: np.ndarray, dt: float) -> np.ndarray:
    """U = exp(-i 2 pi H dt) through the spectral decomposition of H."""
    if dt <= 0:
        raise InvalidArgumentError("dt must be positive")
    h = np.asarray(h, dtype=complex)
    if not is_hermitian(h, 1e-10):
        raise InvalidArgumentError("step Hamiltonian is not Hermitian")
    w, v = np.linalg.eigh(h)
    return (v * np.exp(-2j * np.pi * w * dt)) @ v.conj().T


def _drive_states_batch(omega0: float, omega1, omega, phase, t_grid: np.ndarray,
                        initial: np.ndarray, substep_factor: int) -> np.ndarray:
    """Propagate a batch of drive settings over a shared time grid.

    omega1, omega, phase broadcast to a common batch shape (B,). The
    piecewise-constant propagator samples the drive at substep midpoints;
    each substep is the analytic 2x2 exponential, so every step is exactly
    unitary. Returns states with shape (B, n_times, 2).
    """
    omega1, omega, phase = np.broadcast_arrays(
        np.atleast_1d(np.asarray(omega1, dtype=float)),
        np.atleast_1d(np.asarray(omega, dtype=float)),
        np.atleast_1d(np.asarray(phase, dtype=float)))
    nb = omega1.shape[0]
    nt = len(t_grid)
    fmax = max(omega0, float(np.max(omega1)), float(np.max(omega)))
    dt_grid = float(t_grid[1] - t_grid[0]) if nt > 1 else 0.0
    out = np.empty((nb, nt, 2), dtype=complex)
    c0 = np.full(nb, initial[0], dtype=complex)
    c1 = np.full(nb, initial[1], dtype=complex)
    out[:, 0, 0] = c0
    out[:, 0, 1] = c1
    if nt == 1:
        return out
    nsub = max(1, int(math.ceil(dt_grid * substep_factor * fmax)))
    dt = dt_grid / nsub
    ax = omega0 / 2.0
    two_pi = 2 * np.pi
    for k in range(nt - 1):
        t0 = t_grid[k]
        for s in range(nsub):
            tm = t0 + (s + 0.5) * dt
            az = omega1 * np.cos(two_pi * omega * tm + phase)
            r = np.hypot(ax, az)
            th = two_pi * r * dt
            c = np.cos(th)
            sn = np.sin(th) / r
            ux = -1j * sn * ax
            uz = -1j * sn * az
            n0 = (c + uz) * c0 + ux * c1
            n1 = (c - uz) * c1 + ux * c0
            c0, c1 = n0, n1
        out[:, k + 1, 0] = c0
        out[:, k + 1, 1] = c1
    return out


def propagate(h_of_t, initial, t_grid, substep_factor: int = 200,
              f_max: float | None = None) -> StateTrajectory:
    """Schroedinger evolution on a uniform time grid.

    `h_of_t` is either a DriveParams (handled by the exact 2x2 stepper) or a
    callable t -> Hamiltonian matrix, in which case `f_max` (MHz) must be
    supplied to size the substeps. The internal substep is bounded by
    1 / (substep_factor * f_max); factors below 20 are rejected as
    under-resolved.
    """
    t_grid = np.asarray(t_grid, dtype=float)
    if t_grid.ndim != 1 or len(t_grid) < 1:
        raise InvalidArgumentError("t_grid must be a non-empty 1-d array")
    if len(t_grid) > 1:
        steps = np.diff(t_grid)
        if not np.all(steps > 0) or not np.allclose(steps, steps[0], rtol=1e-9, atol=0):
            raise InvalidArgumentError("t_grid must be uniform and ascending")
    initial = np.asarray(initial, dtype=complex)
    if abs(np.linalg.norm(initial) - 1.0) > 1e-9:
        raise InvalidArgumentError("initial state must be normalized")
    if substep_factor < 20:
        raise InvalidArgumentError(
            "substep_factor below 20 leaves the drive under-resolved")

    if isinstance(h_of_t, DriveParams):
        if initial.shape != (2,):
            raise InvalidArgumentError("drive propagation needs a 2-dim state")
        states = _drive_states_batch(h_of_t.omega0, h_of_t.omega1, h_of_t.omega,
                                     h_of_t.phase_d, t_grid, initial,
                                     substep_factor)[0]
        return StateTrajectory(times=t_grid, states=states)

    if f_max is None or f_max <= 0:
        raise InvalidArgumentError("callable Hamiltonians need a positive f_max")
    dim = len(initial)
    states = np.empty((len(t_grid), dim), dtype=complex)
    states[0] = initial
    psi = initial.copy()
    dt_max = 1.0 / (substep_factor * f_max)
    for k in range(len(t_grid) - 1):
        t0, t1 = t_grid[k], t_grid[k + 1]
        nsub = max(1, int(math.ceil((t1 - t0) / dt_max)))
        dt = (t1 - t0) / nsub
        for s in range(nsub):
            tm = t0 + (s + 0.5) * dt
            psi = step_propagator(h_of_t(tm), dt) @ psi
        states[k + 1] = psi
    return StateTrajectory(times=t_grid, states=states)


def drive_batch(drive: DriveParams, t_grid, omega=None, phase=None,
                initial=None, substep_factor: int = 200) -> np.ndarray:
    """States for a sweep of drive settings, shape (batch, n_times, 2).

    `omega` and `phase` override the corresponding fields of `drive` and
    broadcast against each other, so a resonance sweep crossed with a phase
    ensemble costs one call. All trajectories share `t_grid` and `initial`
    (default |+x>).
    """
    t_grid = np.asarray(t_grid, dtype=float)
    if t_grid.ndim != 1 or len(t_grid) < 2:
        raise InvalidArgumentError("t_grid must hold at least two samples")
    steps = np.diff(t_grid)
    if not np.all(steps > 0) or not np.allclose(steps, steps[0], rtol=1e-9, atol=0):
        raise InvalidArgumentError("t_grid must be uniform and ascending")
    if substep_factor < 20:
        raise InvalidArgumentError(
            "substep_factor below 20 leaves the drive under-resolved")
    if initial is None:
        initial = KET_PLUS_X
    initial = np.asarray(initial, dtype=complex)
    if initial.shape != (2,) or abs(np.linalg.norm(initial) - 1.0) > 1e-9:
        raise InvalidArgumentError("initial state must be a normalized 2-vector")
    omega = drive.omega if omega is None else omega
    phase = drive.phase_d if phase is None else phase
    if np.any(np.asarray(omega, dtype=float) <= 0):
        raise InvalidArgumentError("drive frequencies must be positive")
    return _drive_states_batch(drive.omega0, drive.omega1, omega, phase,
                               t_grid, initial, substep_factor)


def rotating_frame(traj: StateTrajectory, omega: float, sense: int = +1) -> StateTrajectory:
    """Transform into the frame co-rotating about the static axis (sigma_x).

    Applies exp(+i sense pi omega t sigma_x) per sample; sense +1 matches
    the rotation direction of the co-rotating drive component.
    """
    if traj.frame != "lab":
        raise InvalidStateError("trajectory is already in a rotating frame")
    th = np.pi * omega * sense * traj.times
    c = np.cos(th)
    s = 1j * np.sin(th)
    out = np.empty_like(traj.states)
    out[:, 0] = c * traj.states[:, 0] + s * traj.states[:, 1]
    out[:, 1] = c * traj.states[:, 1] + s * traj.states[:, 0]
    return StateTrajectory(times=traj.times, states=out,
                           frame="rotating(%g)" % omega)


def bloch_coords(traj: StateTrajectory) -> BlochTrace:
    """Per-sample Bloch vector of a two-level trajectory."""
    states = traj.states
    if states.shape[-1] != 2:
        raise InvalidArgumentError("Bloch coordinates need 2-dim states")
    a, b = states[:, 0], states[:, 1]
    x = 2 * np.real(a.conj() * b)
    y = 2 * np.imag(a.conj() * b)
    z = np.abs(a) ** 2 - np.abs(b) ** 2
    return BlochTrace(times=traj.times, xyz=np.column_stack([x, y, z]))


def splitmix64(seed: int, n: int) -> np.ndarray:
    """Deterministic uniform floats in [0, 1) from the splitmix64 generator.

    The update and output functions follow the published constants, so a
    given seed yields a bit-reproducible sequence on every platform.
    """
    mask = (1 << 64) - 1
    x = seed & mask
    out = np.empty(n)
    for i in range(n):
        x = (x + 0x9E3779B97F4A7C15) & mask
        z = x
        z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & mask
        z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & mask
        z = z ^ (z >> 31)
        out[i] = (z >> 11) * 2.0 ** -53
    return out


def _population_plus_x(states: np.ndarray) -> np.ndarray:
    """|<+x|psi>|^2 along the last-but-one axis of a state array."""
    amp = (states[..., 0] + states[..., 1]) / np.sqrt(2)
    return np.abs(amp) ** 2


def phase_average(drive: DriveParams, n_phases: int, phase_range=(0.0, np.pi),
                  seed: int = 12345, signal_fn=None, t_grid=None,
                  substep_factor: int = 200, initial=None) -> TimeTrace:
    """Mean signal over drive phases drawn uniformly from `phase_range`.

    Phases come from the seeded splitmix64 stream and replace the phase_d of
    the base drive, so the average is deterministic. `signal_fn(states,
    times)` maps a (n_times, 2) trajectory to a real signal; the default is
    the |+x> population. `initial` defaults to |+x>. Returns a TimeTrace of
    the averaged signal.
    """
    if n_phases < 1:
        raise InvalidArgumentError("n_phases must be at least 1")
    lo, hi = float(phase_range[0]), float(phase_range[1])
    if hi < lo:
        raise InvalidArgumentError("phase_range must satisfy lo <= hi")
    if t_grid is None:
        raise InvalidArgumentError("phase_average needs an explicit t_grid")
    t_grid = np.asarray(t_grid, dtype=float)
    if initial is None:
        initial = KET_PLUS_X
    initial = np.asarray(initial, dtype=complex)
    phases = lo + splitmix64(seed, n_phases) * (hi - lo)
    states = _drive_states_batch(drive.omega0, drive.omega1, drive.omega,
                                 phases, t_grid, initial, substep_factor)
    if signal_fn is None:
        signals = _population_plus_x(states)
    else:
        signals = np.array([signal_fn(states[b], t_grid)
                            for b in range(states.shape[0])])
    mean = signals.mean(axis=0)
    dt = float(t_grid[1] - t_grid[0]) if len(t_grid) > 1 else 0.0
    meta = {"n_phases": n_phases, "seed": seed,
            "phase_range": (lo, hi), "omega1": drive.omega1}
    return TimeTrace(dt=dt, samples=mean, meta=meta)
