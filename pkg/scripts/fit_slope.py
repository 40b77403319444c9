"""Sweep p at fixed distance and fit log p_L against log p, free and fixed exponent.

Usage: python3 scripts/fit_slope.py --d 3 --p 2e-4 4e-4 6e-4 1e-3 --trials 4e6
"""

from __future__ import annotations

import argparse
import os

from hstateprep.montecarlo import fit_alpha, fit_slope, run_campaign
from hstateprep.protocol import ProtocolSpec


def main() -> None:
    ap = argparse.ArgumentParser()
    ap.add_argument("--d", type=int, default=3)
    ap.add_argument("--p", type=float, nargs="+", default=[2e-4, 4e-4, 6e-4, 1e-3])
    ap.add_argument("--trials", type=float, default=4e6)
    ap.add_argument("--seed", type=int, default=0)
    ap.add_argument("--workers", type=int, default=os.cpu_count() or 1)
    args = ap.parse_args()
    pts = []
    for i, p in enumerate(args.p):
        s = run_campaign(ProtocolSpec(args.d), p, int(args.trials), seed=args.seed + i, workers=args.workers)
        print(f"p={p:g} p_acc={s.p_acc:.4f} p_L={s.p_L:.3e} failures={s.n_failures}")
        pts.append((p, s.p_L, s.p_L_ci))
    slope, err = fit_slope(pts)
    fixed = fit_alpha(pts, args.d)
    print(f"free slope {slope:.3f} +- {err:.3f}; expected {(args.d + 1) / 2:g}")
    print(f"alpha at exponent {fixed.exponent:g}: {fixed.alpha:.3e}")


if __name__ == "__main__":
    main()
