"""Harmonic-rich spectra beyond the rotating-wave regime.

A weakly driven two-level system oscillates at one frequency, the drive
amplitude. Once the amplitude rivals the splitting, the population signal
picks up a comb of lines, some ABOVE the drive amplitude, which is the
plainest time-domain signature that the rotating-wave picture has broken
down. This script transforms the population traces for a weak, a moderate,
and two strong amplitudes and tabulates every peak above 20% of maximum.

Run:  python3 demos/strong_drive_spectra.py [--out-dir OUT] [--plot]
"""
import argparse
from pathlib import Path

import numpy as np

from nvlac import DriveParams, TimeTrace, dft, find_peaks, normalize_axis, propagate
from nvlac.dynamics import KET_PLUS_X

OMEGA0 = 1.7
AMPLITUDES = (0.23, 1.6, 2.35, 3.62)


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--out-dir", default=".")
    ap.add_argument("--plot", action="store_true")
    args = ap.parse_args()
    out = Path(args.out_dir)
    out.mkdir(parents=True, exist_ok=True)

    t_grid = np.arange(2048) * 0.02
    spectra = {}
    for omega1 in AMPLITUDES:
        drive = DriveParams(omega0=OMEGA0, omega1=omega1, omega=OMEGA0)
        states = propagate(drive, KET_PLUS_X, t_grid).states
        signal = np.abs(states @ KET_PLUS_X.conj()) ** 2
        spec = dft(TimeTrace(dt=0.02, samples=signal), window="hann")
        spectra[omega1] = normalize_axis(spec, omega1)
        peaks = find_peaks(spec, rel_threshold=0.2)
        above = sum(1 for p in peaks if p.frequency > omega1)
        print("omega1=%.2f MHz: %d peaks above 20%% (%d above the amplitude)"
              % (omega1, len(peaks), above))
        for p in sorted(peaks, key=lambda q: q.frequency):
            print("   f = %7.4f MHz   f/omega1 = %6.3f   amp = %7.1f"
                  % (p.frequency, p.frequency / omega1, p.amplitude))

    path = out / "strong_drive_spectra.csv"
    with open(path, "w") as fh:
        fh.write("omega1_mhz,frequency_over_omega1,amplitude\n")
        for omega1, spec in spectra.items():
            keep = spec.freqs <= 4.0
            for f, a in zip(spec.freqs[keep], spec.amplitudes[keep]):
                fh.write("%.4g,%.9g,%.9g\n" % (omega1, f, a))
    print("wrote %s" % path)

    if args.plot:
        import matplotlib
        matplotlib.use("Agg")
        import matplotlib.pyplot as plt

        fig, axes = plt.subplots(len(AMPLITUDES), 1, figsize=(7, 9),
                                 sharex=True)
        for ax, omega1 in zip(axes, AMPLITUDES):
            spec = spectra[omega1]
            keep = spec.freqs <= 4.0
            ax.plot(spec.freqs[keep], spec.amplitudes[keep], lw=0.8)
            ax.set_ylabel("omega1=%.2f" % omega1)
        axes[-1].set_xlabel("frequency / omega1")
        fig.tight_layout()
        fig.savefig(out / "strong_drive_spectra.png", dpi=150)
        print("wrote %s" % (out / "strong_drive_spectra.png"))


if __name__ == "__main__":
    main()
