"""Run the four check suites on the shipped configs and print their tables.

    python3 scripts/run_checks.py [suite ...]
"""

import sys
from pathlib import Path

from thinfilm.cli import main as cli_main

ROOT = Path(__file__).resolve().parents[1]
SUITES = {"constant": "checks", "lemma1": "checks", "prop4": "checks", "thickfilm": "thickfilm"}


def main(argv: list[str]) -> int:
    worst = 0
    for suite in argv or list(SUITES):
        print(f"== {suite}")
        worst = max(worst, cli_main(["check", suite, str(ROOT / "configs" / f"{SUITES[suite]}.json")]))
    return worst


if __name__ == "__main__":
    sys.exit(main(sys.argv[1:]))
