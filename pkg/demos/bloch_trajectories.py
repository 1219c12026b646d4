"""Bloch-sphere view of a linearly driven two-level system.

In the frame rotating at the drive frequency, a weak resonant drive traces
the familiar slow great-circle Rabi path, pinned near the equator. Crank the
amplitude up to a sizable fraction of the level splitting and the
counter-rotating half of the drive can no longer be averaged away: the
trajectory wobbles off the equator and never quite reaches the south pole.

Run:  python3 demos/bloch_trajectories.py [--out-dir OUT] [--plot]
"""
import argparse
from pathlib import Path

import numpy as np

from nvlac import DriveParams, bloch_coords, propagate, rotating_frame
from nvlac.dynamics import KET_PLUS_X

OMEGA0 = 1.7


def trajectory(omega1, duration, samples):
    drive = DriveParams(omega0=OMEGA0, omega1=omega1, omega=OMEGA0)
    t_grid = np.linspace(0.0, duration, samples)
    traj = rotating_frame(propagate(drive, KET_PLUS_X, t_grid), OMEGA0)
    return t_grid, bloch_coords(traj).xyz


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--out-dir", default=".")
    ap.add_argument("--plot", action="store_true")
    args = ap.parse_args()
    out = Path(args.out_dir)
    out.mkdir(parents=True, exist_ok=True)

    cases = [(0.10, 21.0, 2101), (0.70, 21.0, 2101), (3.62, 5.0, 2001)]
    rows = {}
    for omega1, duration, samples in cases:
        t_grid, xyz = rows[omega1] = trajectory(omega1, duration, samples)
        z_max = np.max(np.abs(xyz[:, 2]))
        x_min = np.min(xyz[:, 0])
        print("omega1=%.2f MHz: max |z| = %.4f, min <sigma_x> = %.4f"
              % (omega1, z_max, x_min))

    path = out / "bloch_trajectories.csv"
    with open(path, "w") as fh:
        fh.write("omega1_mhz,time_us,x,y,z\n")
        for omega1, (t_grid, xyz) in rows.items():
            for t, (x, y, z) in zip(t_grid, xyz):
                fh.write("%.4g,%.6g,%.9g,%.9g,%.9g\n" % (omega1, t, x, y, z))
    print("wrote %s" % path)

    if args.plot:
        import matplotlib
        matplotlib.use("Agg")
        import matplotlib.pyplot as plt

        fig = plt.figure(figsize=(10, 4))
        for k, (omega1, (t_grid, xyz)) in enumerate(rows.items()):
            ax = fig.add_subplot(1, len(rows), k + 1, projection="3d")
            ax.plot(xyz[:, 0], xyz[:, 1], xyz[:, 2], lw=0.6)
            ax.set_title("omega1 = %.2f MHz" % omega1)
            ax.set_xlim(-1, 1)
            ax.set_ylim(-1, 1)
            ax.set_zlim(-1, 1)
        fig.tight_layout()
        fig.savefig(out / "bloch_trajectories.png", dpi=150)
        print("wrote %s" % (out / "bloch_trajectories.png"))


if __name__ == "__main__":
    main()
