"""Compute the ref18 and ref19 screen patterns and write CSV + SVG for each."""
import argparse
from pathlib import Path

from slitwave import PRESET_NAMES, ScanGrid, make_preset, screen_scan
from slitwave.intensity import fringe_spacings, visibility
from slitwave.report import write_csv, write_svg


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--out-dir", default="results")
    ap.add_argument("--points", type=int, default=1501)
    ap.add_argument("--half-range", type=float, default=150e-6, help="meters")
    ap.add_argument("--threads", type=int, default=1)
    args = ap.parse_args()

    out = Path(args.out_dir)
    out.mkdir(parents=True, exist_ok=True)
    grid = ScanGrid(-args.half_range, args.half_range, args.points)
    for name in PRESET_NAMES:
        preset = make_preset(name)
        for mode in ("coherent", "decohered"):
            pat = screen_scan(preset, grid, mode=mode, workers=args.threads)
            stem = out / f"{name}_{mode}"
            write_csv(pat, stem.with_suffix(".csv"))
            write_svg(pat, stem.with_suffix(".svg"), title=f"{name} ({mode})")
            sp = fringe_spacings(pat).mean()
            print(f"{name:6s} {mode:10s} m_max={pat.meta['m_max']:5d} "
                  f"spacing={sp * 1e6:6.2f} um (nominal {pat.nominal_fringe * 1e6:6.2f}) "
                  f"visibility={visibility(pat):.3f}")


if __name__ == "__main__":
    main()
