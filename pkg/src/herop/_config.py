"""Runtime configuration read from the environment.

``HEROP_TOL`` overrides the default relative residual tolerance used by every
checker. ``HEROP_DISABLE_NUMBA=1`` forces the pure-numpy kernels.
"""
import os

DEFAULT_TOL = 1e-9
COMMUTATION_TOL = 1e-10
PRUNE_TOL = 1e-14


def default_tol():
    raw = os.environ.get("HEROP_TOL")
    if raw is None or raw.strip() == "":
        return DEFAULT_TOL
    value = float(raw)
    if not value > 0:
        raise ValueError(f"HEROP_TOL must be positive, got {raw!r}")
    return value


def resolve_tol(tol):
    return default_tol() if tol is None else float(tol)


def numba_disabled():
    return os.environ.get("HEROP_DISABLE_NUMBA", "").strip().lower() in ("1", "true", "yes", "on")
