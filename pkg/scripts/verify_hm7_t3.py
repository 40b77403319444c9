"""Long job: exhaustive 3-flag check of the d=7 H_m circuit (hours).

Usage: python3 scripts/verify_hm7_t3.py [--out hm7_t3.json]
"""

from __future__ import annotations

import argparse
import time

from hstateprep.catalog import build_hm_circuit
from hstateprep.flagverify import fault_set_count, verify_t_flag


def main() -> None:
    ap = argparse.ArgumentParser()
    ap.add_argument("--t", type=int, default=3)
    ap.add_argument("--out")
    args = ap.parse_args()
    entry = build_hm_circuit(7)
    total = fault_set_count(entry, args.t)
    print(f"{entry.id}: {total} fault sets at t={args.t}")
    t0 = time.time()
    report = verify_t_flag(entry, args.t, budget=total)
    print(f"{report.verdict} after {time.time() - t0:.0f}s")
    if args.out:
        with open(args.out, "w") as fh:
            fh.write(report.to_json())


if __name__ == "__main__":
    main()
