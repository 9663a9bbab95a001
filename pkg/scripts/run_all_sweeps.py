"""Run every sweep config under configs/ and write NDJSON, CSV and SVG to results/.

    python3 scripts/run_all_sweeps.py [--out-dir results] [--seed N]
"""

import argparse
import sys
from pathlib import Path

from thinfilm.cli import main as cli_main

ROOT = Path(__file__).resolve().parents[1]
SWEEPS = ("native_x1", "membrane_critical", "membrane_supercritical", "fixed_s")


def main() -> int:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--out-dir", default=str(ROOT / "results"))
    ap.add_argument("--seed", type=int, default=None)
    args = ap.parse_args()
    worst = 0
    for name in SWEEPS:
        print(f"== {name}")
        argv = ["sweep", str(ROOT / "configs" / f"{name}.json"), "--out-dir", args.out_dir]
        if args.seed is not None:
            argv += ["--seed", str(args.seed)]
        worst = max(worst, cli_main(argv))
    return worst


if __name__ == "__main__":
    sys.exit(main())
