"""Backend selection for the hot loops.

Every kernel exists twice: a loop form compiled with numba, and a vectorised
numpy form.  ``DELAYLEARN_BACKEND`` picks the default (``numba`` or
``numpy``); when unset, numba is used if it imports.
"""
import os

from .errors import ConfigError

ENV_FLAG = "DELAYLEARN_BACKEND"
BACKENDS = ("numba", "numpy")

try:
    import numba

    HAS_NUMBA = True
except ImportError:  # pragma: no cover - numba is a declared dependency
    numba = None
    HAS_NUMBA = False


def njit(func):
    """Compile ``func`` with numba when available, otherwise return it unchanged."""
    if HAS_NUMBA:
        return numba.njit(cache=True)(func)
    return func


def default_backend():
    value = os.environ.get(ENV_FLAG, "").strip().lower()
    if not value:
        return "numba" if HAS_NUMBA else "numpy"
    return resolve_backend(value)


def resolve_backend(name=None):
    if name is None:
        return default_backend()
    name = name.lower()
    if name not in BACKENDS:
        raise ConfigError(f"unknown backend {name!r}; expected one of {BACKENDS}")
    if name == "numba" and not HAS_NUMBA:
        raise ConfigError("numba backend requested but numba is not installed")
    return name
