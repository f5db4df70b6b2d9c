#!/usr/bin/env python3
"""Thin wrapper so cases can be launched without installing the package.

Example:
    python scripts/run_case.py --case free_stream --scheme weno5 --fp \
        --metric-order 6 --out out/fs_weno5_m6
"""

import os
import sys

sys.path.insert(0, os.path.join(os.path.dirname(__file__), "..", "src"))

from fpcurv.cli import main  # noqa: E402

if __name__ == "__main__":
    sys.exit(main())
