"""Process-wide numeric settings.

Defaults can be overridden through the environment before import:

``CHL_TOL``   comparison tolerance for unitarity and equality (default 1e-9)
``CHL_GRID``  fingerprint quantization grid (default 1e-6)
``CHL_KMAX``  default search cap for hierarchy classification (default 10)
"""
import os


def _env_float(name, default):
    value = os.environ.get(name)
    return float(value) if value else default


def _env_int(name, default):
    value = os.environ.get(name)
    return int(value) if value else default


TOL = _env_float("CHL_TOL", 1e-9)
GRID = _env_float("CHL_GRID", 1e-6)
KMAX = _env_int("CHL_KMAX", 10)

# rows/columns whose moduli differ by less than this are tied when picking
# the phase-normalizing entry of a fingerprint; the lowest row-major index wins
TIE_BREAK = GRID

MAX_QUBITS = 6


def settings():
    return {"tol": TOL, "grid": GRID, "kmax": KMAX}
