#!/usr/bin/env python3
"""Simulate the two-atom showcase bundles (all three superposition variants)
and export the path CSVs. Usage: python scripts/make_showcase_paths.py [OUT_DIR]."""

import sys
from pathlib import Path

from supcogarch.cli import main

if __name__ == "__main__":
    out = sys.argv[1] if len(sys.argv) > 1 else "out/showcase"
    cfg = Path(__file__).resolve().parents[1] / "configs" / "two_atom_showcase.cfg"
    code = main(["simulate", "--config", str(cfg), "--out", out])
    if code == 0:
        for path in sorted(Path(out).glob("*.csv")):
            print(path)
    sys.exit(code)
