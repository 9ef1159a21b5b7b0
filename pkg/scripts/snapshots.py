"""Snapshots of a one-photon pulse crossing a 50-50 beam splitter.

Writes one CSV per (rail, time) with columns x, re, im, abs2, plus a summary
of the rail norms at each time.

    python3 scripts/snapshots.py --out out/snapshots
"""

from __future__ import annotations

import argparse
import csv
from pathlib import Path

from pulsefock.config import ScenarioConfig
from pulsefock.scenarios import build_setup, run_single_bs, snapshots


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--n", type=int, default=4096)
    ap.add_argument("--width", type=float, default=256.0)
    ap.add_argument("--frames", type=int, default=5)
    ap.add_argument("--out", type=Path, default=Path("out/snapshots"))
    args = ap.parse_args()

    cfg = ScenarioConfig()
    cfg.grid.n = args.n
    cfg.pulse.width = args.width
    cfg.pulse.center = 2 * args.width
    setup = build_setup(cfg.validate())
    res = run_single_bs(setup)
    step = res.t_final / (args.frames - 1)
    times = [float(round(i * step)) for i in range(args.frames)]

    args.out.mkdir(parents=True, exist_ok=True)
    x = setup.grid.x
    norms = {}
    for (rail, t), samples in snapshots(setup, times).items():
        with open(args.out / f"snapshot_{rail}_{t:g}.csv", "w", newline="") as fh:
            wr = csv.writer(fh, lineterminator="\n")
            wr.writerow(["x", "re", "im", "abs2"])
            for xi, s in zip(x, samples):
                wr.writerow([format(v, ".17g") for v in (xi, s.real, s.imag, abs(s) ** 2)])
        norms.setdefault(t, {})[rail] = float((abs(samples) ** 2).sum() * setup.grid.dx)

    for t in times:
        parts = ", ".join(f"{r}: {v:.6f}" for r, v in sorted(norms.get(t, {}).items()))
        print(f"[snapshots] t = {t:g}  {parts}")
    print(f"[snapshots] p_x = {res.p_detector_x:.15f}, p_y = {res.p_detector_y:.15f}")


if __name__ == "__main__":
    main()
