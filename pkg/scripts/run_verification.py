#!/usr/bin/env python3
"""Run the full analytic-vs-Monte-Carlo verification battery on the default
desk-scale configuration. Usage: python scripts/run_verification.py [CONFIG]."""

import sys
from pathlib import Path

from supcogarch.cli import main

if __name__ == "__main__":
    default = Path(__file__).resolve().parents[1] / "configs" / "verify_light.cfg"
    cfg = sys.argv[1] if len(sys.argv) > 1 else str(default)
    sys.exit(main(["verify", "--config", cfg]))
