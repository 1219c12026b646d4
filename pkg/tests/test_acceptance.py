"""End-to-end acceptance checks, one numbered criterion per test.

Each test prints a single `ACCEPTANCE NN PASS/FAIL - detail` line through the
capture-disabled channel so the verdicts are visible in any pytest run, then
asserts. Frozen reference values were derived with standalone oracle scripts
before the package implementation existed.
"""
import time

import numpy as np
import pytest

from nvlac import (
    DriveParams,
    TimeTrace,
    bloch_coords,
    build_hamiltonian,
    dft,
    drive_batch,
    eigensystem,
    find_lac,
    find_peaks,
    phase_average,
    propagate,
    rabi_experiment,
    ramsey_experiment,
    rotating_frame,
    step_propagator,
    RamseyConfig,
    FieldSpec,
    SpinSystemParams,
)
from nvlac.dynamics import KET_PLUS_X
from nvlac.operators import is_hermitian, spin_operators
from nvlac.spectra import pair_indices, reference_pair_states, tls_extract

W0 = 1.7


@pytest.fixture
def report(capsys):
    def _report(num, ok, detail):
        line = "ACCEPTANCE %02d %s - %s" % (num, "PASS" if ok else "FAIL", detail)
        with capsys.disabled():
            print("\n" + line)
        assert ok, line
    return _report


def _plus_x_signal(drive, t_grid):
    states = propagate(drive, KET_PLUS_X, t_grid).states
    return np.abs(states @ KET_PLUS_X.conj()) ** 2


def _hann_peaks(signal, dt, rel_threshold):
    spec = dft(TimeTrace(dt=dt, samples=signal), window="hann",
               zero_pad_factor=4)
    return find_peaks(spec, rel_threshold=rel_threshold), spec


def _sine_fit_r2(signal, t_grid, f0):
    design = np.column_stack([np.cos(2 * np.pi * f0 * t_grid),
                              np.sin(2 * np.pi * f0 * t_grid),
                              np.ones_like(t_grid)])
    coef, *_ = np.linalg.lstsq(design, signal, rcond=None)
    resid = signal - design @ coef
    return 1.0 - np.sum(resid ** 2) / np.sum((signal - signal.mean()) ** 2)


def test_01_anticrossing_location(params, report):
    t0 = time.monotonic()
    tls = find_lac(params, 28.9, 0.0, (35.0, 42.0))
    elapsed = time.monotonic() - t0
    ok = (abs(tls.theta_star - 38.4) <= 0.5
          and abs(tls.omega0 - 1.7) <= 0.2
          and elapsed < 10.0)
    report(1, ok, "theta*=%.4f deg, omega0=%.4f MHz, %.2fs"
           % (tls.theta_star, tls.omega0, elapsed))


def test_02_zeeman_condition(params, lac, report):
    condition = 2.0 * params.gamma_e * 28.9 * np.cos(np.deg2rad(lac.theta_star))
    ok = abs(condition - 127.0) <= 2.0
    report(2, ok, "2 gamma_e B cos(theta*) = %.4f MHz" % condition)


def test_03_pair_mixing(params, lac, lac_field, report):
    t0 = time.monotonic()
    eig = eigensystem(build_hamiltonian(params, lac_field), check=False)
    tls = tls_extract(eig, pair_indices(eig))
    refs = reference_pair_states()
    o1 = max(abs(np.vdot(r, tls.psi1)) ** 2 for r in refs)
    o2 = max(abs(np.vdot(r, tls.psi2)) ** 2 for r in refs)
    elapsed = time.monotonic() - t0
    ok = o1 >= 0.96 and o2 >= 0.96 and tls.moment >= 0.95 and elapsed < 1.0
    report(3, ok, "overlaps %.4f / %.4f, moment %.4f, %.2fs"
           % (o1, o2, tls.moment, elapsed))


def test_04_weak_drive_sinusoid(report):
    t0 = time.monotonic()
    t_grid = np.linspace(0.0, 40.0, 2001)
    signal = _plus_x_signal(DriveParams(W0, 0.23, W0), t_grid)
    peaks, spec = _hann_peaks(signal, t_grid[1] - t_grid[0], 0.2)
    best = peaks.peaks[0]
    r2 = _sine_fit_r2(signal, t_grid, best.frequency)
    elapsed = time.monotonic() - t0
    ok = (len(peaks) == 1
          and abs(best.frequency - 0.23) <= spec.df
          and r2 > 0.99
          and elapsed < 5.0)
    report(4, ok, "%d peak(s), f=%.4f MHz (bin %.4f), R2=%.5f, %.2fs"
           % (len(peaks), best.frequency, spec.df, r2, elapsed))


def test_05_bloch_siegert_shift(report):
    t0 = time.monotonic()
    w1 = 0.3
    predicted = w1 ** 2 / (4.0 * W0)
    t_grid = np.linspace(0.0, 80.0, 4001)
    dt = t_grid[1] - t_grid[0]
    detunings = np.linspace(-0.004, 0.030, 18)
    phases = np.linspace(0.0, np.pi, 8, endpoint=False)
    dd, pp = np.meshgrid(detunings, phases, indexing="ij")

    drive = DriveParams(omega0=W0, omega1=w1, omega=W0)
    states = drive_batch(drive, t_grid, omega=W0 + dd.ravel(), phase=pp.ravel())
    x = 2.0 * np.real(states[:, :, 0].conj() * states[:, :, 1])
    pop = (1.0 - x) / 2.0

    # fringe amplitude per trajectory: dominant sub-MHz line, then a
    # least-squares quadrature fit at that frequency on the raw signal
    n_pad = 16384
    windowed = (pop - pop.mean(axis=1, keepdims=True)) * np.hanning(pop.shape[1])
    spectra = np.abs(np.fft.rfft(windowed, n_pad, axis=1))
    df = 1.0 / (n_pad * dt)
    k_max = int(1.0 / df)
    amps = np.empty(pop.shape[0])
    for row in range(pop.shape[0]):
        band = spectra[row, 1:k_max]
        k = 1 + int(np.argmax(band))
        a, b, c = spectra[row, k - 1:k + 2]
        f0 = (k + 0.5 * (a - c) / (a - 2 * b + c)) * df
        design = np.column_stack([np.cos(2 * np.pi * f0 * t_grid),
                                  np.sin(2 * np.pi * f0 * t_grid),
                                  np.ones_like(t_grid)])
        coef, *_ = np.linalg.lstsq(design, pop[row], rcond=None)
        amps[row] = np.hypot(coef[0], coef[1])

    contrast = amps.reshape(len(detunings), len(phases)).mean(axis=1)
    i = int(np.argmax(contrast))
    window = slice(max(0, i - 3), min(len(detunings), i + 4))
    quad = np.polyfit(detunings[window], contrast[window], 2)
    vertex = -quad[1] / (2.0 * quad[0])
    rel_err = abs(vertex - predicted) / predicted
    elapsed = time.monotonic() - t0
    ok = rel_err < 0.25 and elapsed < 60.0
    report(5, ok, "shift %.6f MHz vs predicted %.6f (err %.0f%%), %.1fs"
           % (vertex, predicted, 100 * rel_err, elapsed))


def test_06_strong_drive_peaks(report):
    t0 = time.monotonic()
    t_grid = np.arange(2048) * 0.02
    notes = []
    ok = True
    for w1 in (2.35, 3.62):
        signal = _plus_x_signal(DriveParams(W0, w1, W0), t_grid)
        peaks, _ = _hann_peaks(signal, 0.02, 0.2)
        freqs = sorted(p.frequency for p in peaks)
        ok = ok and len(freqs) >= 3 and max(freqs) > w1
        notes.append("w1=%g: %d peaks, top %.3f" % (w1, len(freqs), max(freqs)))

    averaged = phase_average(DriveParams(W0, 3.62, W0), 100, seed=12345,
                             t_grid=t_grid)
    peaks, _ = _hann_peaks(averaged.samples, 0.02, 0.1)
    ratios = [p.frequency / 3.62 for p in peaks]
    in_band = [r for r in ratios if 1.1 <= r <= 1.3]
    ok = ok and bool(in_band)
    elapsed = time.monotonic() - t0
    ok = ok and elapsed < 60.0
    notes.append("averaged f/w1 in [1.1,1.3]: %s"
                 % (", ".join("%.3f" % r for r in in_band) or "none"))
    report(6, ok, "; ".join(notes) + ", %.1fs" % elapsed)


def test_07_phase_invariant_positions(report):
    t0 = time.monotonic()
    t_grid = np.arange(2048) * 0.02
    sets, spectra = {}, {}
    for deg in (0, 60, 120):
        drive = DriveParams(W0, 3.62, W0, phase_d=np.deg2rad(deg))
        signal = _plus_x_signal(drive, t_grid)
        peaks, spec = _hann_peaks(signal, 0.02, 0.2)
        sets[deg] = sorted(p.frequency for p in peaks)
        spectra[deg] = spec
    df = spectra[0].df

    n60, n120 = len(sets[60]), len(sets[120])
    positions_ok = n60 == n120 and all(
        abs(a - b) <= df for a, b in zip(sets[60], sets[120]))
    # the zero-phase line set is the symmetric subset of the others
    for deg in (60, 120):
        positions_ok = positions_ok and all(
            min(abs(f - g) for g in sets[deg]) <= df for f in sets[0])

    def rms_diff(a, b):
        xa, xb = spectra[a].amplitudes, spectra[b].amplitudes
        return np.linalg.norm(xa - xb) / max(np.linalg.norm(xa),
                                             np.linalg.norm(xb))

    d60, d120 = rms_diff(0, 60), rms_diff(0, 120)
    amplitudes_ok = d60 > 0.10 and d120 > 0.10
    elapsed = time.monotonic() - t0
    ok = positions_ok and amplitudes_ok and elapsed < 60.0
    report(7, ok, "peaks %d/%d/%d aligned=%s, amp diff %.2f / %.2f, %.1fs"
           % (len(sets[0]), n60, n120, positions_ok, d60, d120, elapsed))


def test_08_incomplete_flipping(report):
    t0 = time.monotonic()
    t_grid = np.arange(251) * 0.02
    traj = propagate(DriveParams(W0, 3.62, W0), KET_PLUS_X, t_grid)
    x_min = float(np.min(bloch_coords(traj).xyz[:, 0]))
    elapsed = time.monotonic() - t0
    ok = x_min > -0.995 and elapsed < 5.0
    report(8, ok, "min <sigma_x> over 0-5 us = %.6f, %.2fs" % (x_min, elapsed))


def test_09_ramsey_detuning(params, lac_field, report):
    t0 = time.monotonic()
    tau_grid = np.arange(2000) * 0.01

    def peak_set(nu_d):
        cfg = RamseyConfig(nu_d=nu_d, flip=np.pi, tau_grid=tau_grid)
        trace = ramsey_experiment(params, lac_field, cfg)
        spec = dft(TimeTrace(dt=0.01, samples=trace.signal),
                   window="hann", zero_pad_factor=4)
        # 5% floor isolates the physical lines from sub-3% satellites
        peaks = find_peaks(spec, rel_threshold=0.05)
        zq = sorted(p.frequency for p in peaks if p.frequency < nu_d / 2)
        sq = sorted(p.frequency for p in peaks if p.frequency >= nu_d / 2)
        return zq, sq, spec.df

    zq20, sq20, df = peak_set(20.0)
    zq15, sq15, _ = peak_set(15.0)

    stationary = all(min(abs(f - g) for g in zq15) < 0.02 for f in zq20) \
        and len(zq20) > 0
    shifted = all(min(abs((f - 5.0) - g) for g in sq15) <= df for f in sq20) \
        and len(sq20) > 0
    at_17 = any(abs(f - 1.7) <= 0.1 for f in zq20)
    at_64 = any(abs(f - 6.4) <= 0.1 for f in zq20)
    elapsed = time.monotonic() - t0
    ok = stationary and shifted and at_17 and at_64 and elapsed < 300.0
    report(9, ok,
           "zq lines %s stationary=%s; sq shift by 5=%s; "
           "line at 1.7+-0.1: %s; line at 6.4+-0.1: %s; %.1fs"
           % (", ".join("%.4f" % f for f in zq20), stationary, shifted,
              at_17, at_64, elapsed))


def test_10_reduction_validity(params, lac, lac_field, report):
    t0 = time.monotonic()
    t_grid = np.linspace(0.0, 5.0, 251)
    notes = []
    ok = True
    for w1 in (0.23, 1.6, 2.35, 3.62):
        full = rabi_experiment(params, lac_field, w1, rf_freq=lac.omega0,
                               t_grid=t_grid, mode="full-18")
        reduced = rabi_experiment(params, lac_field, w1, rf_freq=lac.omega0,
                                  t_grid=t_grid, mode="tls-2")
        span = full.signal.max() - full.signal.min()
        nrms = np.sqrt(np.mean((full.signal - reduced.signal) ** 2)) / span
        ok = ok and nrms < 0.1
        notes.append("w1=%g: %.4f" % (w1, nrms))
    elapsed = time.monotonic() - t0
    ok = ok and elapsed < 300.0
    report(10, ok, "normalized rms " + ", ".join(notes) + ", %.1fs" % elapsed)


def test_11_numerical_hygiene(params, lac_field, rng, report):
    t0 = time.monotonic()
    checks = {}

    worst = 0.0
    for mult in (2, 3, 4):
        sx, sy, sz = spin_operators(mult)
        worst = max(worst,
                    np.linalg.norm(sx @ sy - sy @ sx - 1j * sz),
                    np.linalg.norm(sy @ sz - sz @ sy - 1j * sx),
                    np.linalg.norm(sz @ sx - sx @ sz - 1j * sy))
    checks["commutators"] = worst < 1e-12

    h = build_hamiltonian(params, lac_field)
    checks["hermiticity"] = is_hermitian(h, 1e-12)

    m = rng.standard_normal((8, 8)) + 1j * rng.standard_normal((8, 8))
    u = step_propagator((m + m.conj().T) / 2, 0.01)
    checks["unitarity"] = np.linalg.norm(u @ u.conj().T - np.eye(8)) < 1e-12

    t_grid = np.arange(251) * 0.02
    traj = propagate(DriveParams(W0, 2.35, W0), KET_PLUS_X, t_grid)
    norms = np.linalg.norm(traj.states, axis=1)
    checks["norm"] = np.max(np.abs(norms - 1.0)) < 1e-12

    samples = rng.standard_normal(256)
    spec = dft(TimeTrace(dt=0.01, samples=samples), window="none",
               zero_pad_factor=1)
    x = samples - samples.mean()
    a2 = spec.amplitudes ** 2
    e_freq = (a2[0] + 2 * np.sum(a2[1:-1]) + a2[-1]) / len(samples)
    checks["parseval"] = abs(e_freq - np.sum(x ** 2)) <= 1e-9 * np.sum(x ** 2)

    # default substepping against an 8x finer oracle; the commensurate
    # 2.35 MHz drive accumulates phase error coherently and needs the
    # documented finer setting to reach the same fidelity
    defects = {}
    for w1, factor in ((3.62, 200), (2.35, 800)):
        coarse = propagate(DriveParams(W0, w1, W0), KET_PLUS_X, t_grid,
                           substep_factor=factor)
        fine = propagate(DriveParams(W0, w1, W0), KET_PLUS_X, t_grid,
                         substep_factor=8 * factor)
        defects[w1] = 1.0 - np.abs(np.vdot(fine.states[-1],
                                           coarse.states[-1])) ** 2
    checks["stepper"] = all(d <= 1e-8 for d in defects.values())

    elapsed = time.monotonic() - t0
    ok = all(checks.values()) and elapsed < 30.0
    detail = ", ".join("%s=%s" % (name, "ok" if good else "BAD")
                       for name, good in checks.items())
    report(11, ok, detail + ", fidelity defects %.1e / %.1e, %.1fs"
           % (defects[3.62], defects[2.35], elapsed))
