"""Search H_m designs, verify them exhaustively and freeze them into the package fixture.

Usage: python3 scripts/search_hm_designs.py [--out src/hstateprep/data/hm_designs.json]
"""

from __future__ import annotations

import argparse
import json
import time
from pathlib import Path

from hstateprep.catalog import build_hm_from_design
from hstateprep.flagverify import verify_t_flag
from hstateprep.hmsearch import search_hm_design

# (d, t used by the pre-screen, t checked exhaustively here)
TARGETS = ((3, 1, 1), (5, 2, 2), (7, 3, 2))


def main() -> None:
    ap = argparse.ArgumentParser()
    ap.add_argument("--out", default=str(Path(__file__).resolve().parents[1] / "src/hstateprep/data/hm_designs.json"))
    ap.add_argument("--seeds", type=int, default=20)
    args = ap.parse_args()
    designs = {}
    for d, t_screen, t_verify in TARGETS:
        for seed in range(args.seeds):
            t0 = time.time()
            design = search_hm_design(d, t_screen, seed=seed)
            if design is None:
                continue
            report = verify_t_flag(build_hm_from_design(design), t_verify)
            print(f"d={d} seed={seed} {report.verdict} fault_sets={report.fault_sets} {time.time() - t0:.1f}s")
            if report.ok:
                designs[str(d)] = design.to_dict() | {"seed": seed, "prescreen_t": t_screen, "verified_t": t_verify}
                break
        else:
            raise SystemExit(f"no verified design for d={d}")
    Path(args.out).write_text(json.dumps(designs, indent=1) + "\n")
    print("wrote", args.out)


if __name__ == "__main__":
    main()
