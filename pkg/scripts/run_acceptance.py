"""Run every acceptance check and print one line per criterion."""

import runpy
import sys
from pathlib import Path

if __name__ == "__main__":
    sys.argv = [str(Path(__file__).parents[1] / "tests" / "test_acceptance.py")]
    runpy.run_path(sys.argv[0], run_name="__main__")
