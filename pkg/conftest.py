"""Make the src layout importable when the package is not installed."""

import sys
from pathlib import Path

_SRC = Path(__file__).resolve().parent / "src"
try:
    import autotherm  # noqa: F401
except ImportError:
    sys.path.insert(0, str(_SRC))
