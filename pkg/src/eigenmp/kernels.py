"""Sweep-kernel backend selection.

The compiled Cython kernels are used when the extension built; otherwise the
numpy fallback is selected.  ``EIGENMP_BACKEND=python|compiled`` overrides,
and ``use_backend`` switches at runtime (the test suite uses it to check the
two implementations against each other).
"""

import os

from . import _kernels_py

try:
    from . import _speedups as _kernels_cy

    HAVE_COMPILED = True
except ImportError:  # pragma: no cover - build-environment dependent
    _kernels_cy = None
    HAVE_COMPILED = False

_forced = None


def _from_env():
    want = os.environ.get("EIGENMP_BACKEND", "").strip().lower()
    if want in ("python", "py"):
        return _kernels_py
    if want in ("compiled", "cython", "c"):
        if not HAVE_COMPILED:
            raise RuntimeError("EIGENMP_BACKEND=compiled but the extension is not built")
        return _kernels_cy
    return None


def backend():
    if _forced is not None:
        return _forced
    env = _from_env()
    if env is not None:
        return env
    return _kernels_cy if HAVE_COMPILED else _kernels_py


def backend_name():
    return backend().name


def use_backend(which):
    """Force a backend ('python', 'compiled' or None to restore auto)."""
    global _forced
    if which is None:
        _forced = None
    elif which == "python":
        _forced = _kernels_py
    elif which in ("compiled", "cython"):
        if not HAVE_COMPILED:
            raise RuntimeError("compiled backend unavailable")
        _forced = _kernels_cy
    else:
        raise ValueError("unknown backend %r" % which)
    return backend_name()
