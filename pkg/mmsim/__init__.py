"""Steady-state entanglement simulator for two hopping-coupled magnomechanical cavities."""
import sys

__version__ = "1.0.0"

MIN_PYTHON = (3, 10)

if sys.version_info < MIN_PYTHON:
    raise ImportError(
        f"mmsim requires Python {'.'.join(map(str, MIN_PYTHON))} or newer, "
        f"found {sys.version.split()[0]}"
    )
