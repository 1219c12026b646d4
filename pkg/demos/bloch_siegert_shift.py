"""Measuring the resonance shift caused by the counter-rotating field.

A linearly polarized drive is two circular fields; the one rotating against
the spin is usually dropped. It does not vanish, though: it pushes the true
resonance slightly above the bare splitting, by omega1^2 / (4 omega0) to
leading order. This script sweeps the drive frequency around resonance at
several amplitudes, locates the fringe-contrast maximum with a quadratic
fit, and compares the measured shift against the leading-order prediction,
including the quadratic scaling with amplitude.

Run:  python3 demos/bloch_siegert_shift.py [--out-dir OUT] [--plot]
"""
import argparse
from pathlib import Path

import numpy as np

from nvlac import DriveParams, drive_batch

OMEGA0 = 1.7
AMPLITUDES = (0.2, 0.3, 0.4)


def fringe_contrast(omega1, detunings, t_grid):
    """Phase-averaged fringe amplitude at each drive detuning."""
    dt = t_grid[1] - t_grid[0]
    phases = np.linspace(0.0, np.pi, 8, endpoint=False)
    dd, pp = np.meshgrid(detunings, phases, indexing="ij")
    drive = DriveParams(omega0=OMEGA0, omega1=omega1, omega=OMEGA0)
    states = drive_batch(drive, t_grid, omega=OMEGA0 + dd.ravel(),
                         phase=pp.ravel())
    x = 2.0 * np.real(states[:, :, 0].conj() * states[:, :, 1])
    pop = (1.0 - x) / 2.0

    # dominant sub-MHz line per trajectory, then a quadrature fit there
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
    return amps.reshape(len(detunings), len(phases)).mean(axis=1)


def vertex_of(detunings, contrast):
    i = int(np.argmax(contrast))
    window = slice(max(0, i - 3), min(len(detunings), i + 4))
    quad = np.polyfit(detunings[window], contrast[window], 2)
    return -quad[1] / (2.0 * quad[0])


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--out-dir", default=".")
    ap.add_argument("--plot", action="store_true")
    args = ap.parse_args()
    out = Path(args.out_dir)
    out.mkdir(parents=True, exist_ok=True)

    t_grid = np.linspace(0.0, 80.0, 4001)
    detunings = np.linspace(-0.004, 0.030, 18)

    rows = []
    curves = {}
    for omega1 in AMPLITUDES:
        contrast = fringe_contrast(omega1, detunings, t_grid)
        shift = vertex_of(detunings, contrast)
        predicted = omega1 ** 2 / (4.0 * OMEGA0)
        rows.append((omega1, shift, predicted))
        curves[omega1] = contrast
        print("omega1 = %.2f MHz: measured shift %+.6f MHz, "
              "predicted omega1^2/(4 omega0) = %.6f (err %.0f%%)"
              % (omega1, shift, predicted,
                 100 * abs(shift - predicted) / predicted))

    # quadratic scaling: shift / omega1^2 should be constant at 1/(4 omega0)
    ratios = [shift / omega1 ** 2 for omega1, shift, _ in rows]
    print("shift / omega1^2 across amplitudes: %s  (1/(4 omega0) = %.4f)"
          % (", ".join("%.4f" % r for r in ratios), 1.0 / (4.0 * OMEGA0)))

    path = out / "bloch_siegert_shift.csv"
    with open(path, "w") as fh:
        fh.write("omega1_mhz,detuning_mhz,contrast\n")
        for omega1 in AMPLITUDES:
            for d, c in zip(detunings, curves[omega1]):
                fh.write("%.4g,%.9g,%.9g\n" % (omega1, d, c))
    print("wrote %s" % path)

    if args.plot:
        import matplotlib
        matplotlib.use("Agg")
        import matplotlib.pyplot as plt

        fig, ax = plt.subplots(figsize=(7, 4.5))
        for (omega1, shift, predicted) in rows:
            line, = ax.plot(detunings * 1e3, curves[omega1], "o-", ms=3,
                            label="omega1 = %.2f MHz" % omega1)
            ax.axvline(shift * 1e3, color=line.get_color(), ls="--", lw=0.8)
            ax.axvline(predicted * 1e3, color=line.get_color(), ls=":", lw=0.8)
        ax.set_xlabel("drive detuning above omega0 (kHz)")
        ax.set_ylabel("phase-averaged fringe contrast")
        ax.legend()
        fig.tight_layout()
        fig.savefig(out / "bloch_siegert_shift.png", dpi=150)
        print("wrote %s" % (out / "bloch_siegert_shift.png"))


if __name__ == "__main__":
    main()
