#!/usr/bin/env python3
"""
Main entry point for the incompressible membrane simulator
"""

import os
import sys

from src.config.settings import settings

# thread caps must be in place before numpy is imported
for _variable in ("OMP_NUM_THREADS", "OPENBLAS_NUM_THREADS", "MKL_NUM_THREADS", "NUMEXPR_NUM_THREADS"):
    os.environ.setdefault(_variable, str(settings.THREADS))

from src.cli.interface import main  # noqa: E402

if __name__ == "__main__":
    sys.exit(main())
