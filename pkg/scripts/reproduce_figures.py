"""Write every figure preset as CSV into a directory.

    python scripts/reproduce_figures.py out/ [--oracle]
"""

import argparse
import time
from pathlib import Path

from pseudowell import sweep


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("outdir", type=Path)
    ap.add_argument("--oracle", action="store_true", help="transfer-matrix values instead of closed forms")
    args = ap.parse_args()
    args.outdir.mkdir(parents=True, exist_ok=True)
    for name, preset in sweep.PRESETS.items():
        t0 = time.perf_counter()
        path = args.outdir / f"{name}.csv"
        sweep.emit_figure(name, path, oracle=args.oracle)
        print(f"{name:6s} {preset.description:40s} -> {path}  ({time.perf_counter() - t0:.2f} s)")


if __name__ == "__main__":
    main()
