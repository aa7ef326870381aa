"""Peak-relative pattern change per doubling of the transverse mode cutoff."""
import argparse

import numpy as np

from slitwave import ScanGrid, make_preset
from slitwave.intensity import SimulationConfig, _intensity, scan_amplitudes
from slitwave.slit_modes import Truncation


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--preset", default="ref18")
    ap.add_argument("--points", type=int, default=301)
    ap.add_argument("--m-start", type=int, default=64)
    ap.add_argument("--m-stop", type=int, default=8192)
    args = ap.parse_args()

    cfg = SimulationConfig.from_preset(make_preset(args.preset))
    s = ScanGrid(-150e-6, 150e-6, args.points).positions()
    levels = []
    m = args.m_start
    while m <= args.m_stop:
        levels.append(m)
        m *= 2
    prev = None
    print(f"{'m_max':>6s}  {'peak-rel change':>15s}  {'pointwise max':>13s}")
    for m_max, psi1, psi2 in scan_amplitudes(cfg, s, Truncation(m_cap=args.m_stop), levels=levels):
        y = _intensity(psi1, psi2, cfg.coherence, "decohered")
        if prev is not None:
            peak = np.max(np.abs(y - prev)) / np.max(y)
            point = np.max(np.abs(y - prev) / y)
            print(f"{m_max:6d}  {peak:15.3e}  {point:13.3e}")
        else:
            print(f"{m_max:6d}  {'-':>15s}  {'-':>13s}")
        prev = y


if __name__ == "__main__":
    main()
