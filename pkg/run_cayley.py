#!/usr/bin/env python3
"""
Cayley cubic point counter - command-line entry point

    python run_cayley.py count --max-b 30 --method torsor
    python run_cayley.py decompose 2 3 6 -1
"""

import sys
from pathlib import Path

# Add project root to Python path
project_root = Path(__file__).parent
sys.path.insert(0, str(project_root))

from src.orchestration.cli import run  # noqa: E402

if __name__ == "__main__":
    sys.exit(run(sys.argv[1:]))
