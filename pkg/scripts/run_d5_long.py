"""Long job: d=5 at p = 5e-4 with 1e8 trials, checkpointed so it can be resumed.

Usage: python3 scripts/run_d5_long.py [--trials 1e8] [--checkpoint d5.ckpt.json]
"""

from __future__ import annotations

import argparse
import json
import os

from hstateprep.montecarlo import run_campaign
from hstateprep.protocol import ProtocolSpec

TARGET = 5.23e-6


def main() -> None:
    ap = argparse.ArgumentParser()
    ap.add_argument("--trials", type=float, default=1e8)
    ap.add_argument("--seed", type=int, default=5)
    ap.add_argument("--workers", type=int, default=os.cpu_count() or 1)
    ap.add_argument("--checkpoint", default="d5_long.ckpt.json")
    ap.add_argument("--out", default="d5_long.json")
    args = ap.parse_args()
    s = run_campaign(ProtocolSpec(5), 5e-4, int(args.trials), seed=args.seed, workers=args.workers,
                     checkpoint=args.checkpoint)
    ratio = s.p_L / TARGET
    print(f"p_acc={s.p_acc:.4f} p_L={s.p_L:.3e} CI={s.p_L_ci} failures={s.n_failures}")
    print(f"ratio to {TARGET:g}: {ratio:.2f} ({'within' if 0.5 <= ratio <= 2 else 'outside'} a factor of 2)")
    with open(args.out, "w") as fh:
        json.dump(s.to_dict(), fh, indent=1)


if __name__ == "__main__":
    main()
