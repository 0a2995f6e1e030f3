#!/usr/bin/env python3
"""Run both named demos end to end and write their reports to reports/.

Usage: python3 scripts/run_demos.py [output_dir]
"""

import sys
from pathlib import Path

from koszulkit.cli import main


def run(outdir: Path) -> int:
    outdir.mkdir(parents=True, exist_ok=True)
    jobs = [
        (["demo", "theorem-1.1", "--out", str(outdir / "theorem-1.1.json")], "growth table"),
        (["demo", "theorem-1.1", "--format", "csv", "--out", str(outdir / "theorem-1.1.csv")], "growth csv"),
        (["demo", "theorem-2.1", "--out", str(outdir / "theorem-2.1.json")], "obstruction certificates"),
    ]
    for argv, label in jobs:
        code = main(argv)
        print(f"{label}: exit {code} -> {argv[-1]}")
        if code != 0:
            return code
    return 0


if __name__ == "__main__":
    target = Path(sys.argv[1]) if len(sys.argv) > 1 else Path("reports")
    raise SystemExit(run(target))
