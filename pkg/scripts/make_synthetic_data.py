"""Write a synthetic 'measured' pattern for exercising `slitwave compare`.

This is NOT digitised experimental data: it is the ref18 model itself,
scaled to counts and perturbed by Gaussian noise with a fixed seed.
"""
import argparse

import numpy as np

from slitwave import ScanGrid, make_preset, screen_scan


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--out", default="tests/data/synthetic_ref18.csv")
    ap.add_argument("--seed", type=int, default=7)
    ap.add_argument("--counts", type=float, default=250.0)
    ap.add_argument("--noise", type=float, default=0.01, help="sigma as a fraction of peak")
    args = ap.parse_args()

    model = screen_scan(make_preset("ref18"), ScanGrid(-150e-6, 150e-6, 1501))
    pos = np.linspace(-120e-6, 120e-6, 61)
    clean = args.counts * np.interp(pos, model.s_m, model.intensity)
    rng = np.random.default_rng(args.seed)
    noisy = clean + rng.normal(0.0, args.noise * args.counts, pos.size)
    with open(args.out, "w") as fh:
        fh.write(f"# synthetic ref18 counts: model x {args.counts:g} + N(0, {args.noise:g} peak), seed {args.seed}\n")
        fh.write("position_um,counts\n")
        for x, y in zip(pos * 1e6, noisy):
            fh.write(f"{x:.6g},{y:.6g}\n")


if __name__ == "__main__":
    main()
