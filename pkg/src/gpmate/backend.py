"""Kernel backend selection.

The hot kernels (tree scan, tree evaluation, common-region walk) exist in
two implementations: numba-jitted and pure NumPy. The active one is
resolved once, lazily:

* ``GPMATE_BACKEND=numpy`` forces the NumPy fallback,
* ``GPMATE_BACKEND=numba`` requires numba (ImportError if missing),
* unset: numba when importable, NumPy otherwise.

Both backends are individually deterministic and bit-identical on the
integer kernels and on protected arithmetic. The transcendentals can
differ in the last ulps between the vectorized and libm code paths, and
deep trees amplify that without bound (sin of a huge argument has no
shared answer at double precision), so runs are always produced under a
single backend; the `bench` CLI command measures speed and divergence.
"""

import os

from . import _kernels_numpy

ENV_VAR = "GPMATE_BACKEND"

_active = None


def _load_numba_kernels():
    from . import _kernels_numba

    return _kernels_numba


def _resolve(name=None):
    if name is None:
        name = os.environ.get(ENV_VAR, "").strip().lower() or None
    if name == "numpy":
        return _kernels_numpy
    if name == "numba":
        return _load_numba_kernels()
    if name is None:
        try:
            return _load_numba_kernels()
        except ImportError:
            return _kernels_numpy
    raise ValueError(f"unknown backend {name!r}; expected 'numba' or 'numpy'")


def kernels():
    """The active kernels module (resolved on first use)."""
    global _active
    if _active is None:
        _active = _resolve()
    return _active


def active_name():
    return kernels().NAME


def set_backend(name):
    """Force a backend by name, or re-resolve from the environment (None).

    Intended for tests and the benchmark command; normal code never calls
    this. Trees carry no backend state, so switching mid-process is safe.
    """
    global _active
    _active = _resolve(name) if name is not None else None
    return active_name()
