import os

DEFAULT_TOL = 1e-8
TOL_ENV_VAR = "MISOTOOL_TOL"


def default_tol() -> float:
    """Return the global default tolerance.

    ``MISOTOOL_TOL`` overrides the built-in value of 1e-8; it is read at call
    time so the CLI and tests can change it per process.
    """
    raw = os.environ.get(TOL_ENV_VAR)
    if raw is None or raw.strip() == "":
        return DEFAULT_TOL
    tol = float(raw)
    if not tol > 0:
        raise ValueError(f"{TOL_ENV_VAR} must be positive, got {raw!r}")
    return tol


def resolve_tol(tol):
    return default_tol() if tol is None else float(tol)
