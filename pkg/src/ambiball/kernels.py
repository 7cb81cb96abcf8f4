"""Kernel selection: the compiled ``_kernels`` extension when it imports,
otherwise the numpy twins in ``_fallback``.

Set ``AMBIBALL_PURE_PYTHON=1`` to force the fallback.
"""
import os

from . import _fallback

OPTIMAL, UNBOUNDED, ITERATION_LIMIT = _fallback.OPTIMAL, _fallback.UNBOUNDED, _fallback.ITERATION_LIMIT

_compiled = None
if os.environ.get("AMBIBALL_PURE_PYTHON", "") not in ("1", "true", "yes"):
    try:
        from . import _kernels as _compiled
    except ImportError:
        _compiled = None

BACKEND = "cython" if _compiled is not None else "python"


def get_backend(name=None):
    """Return the kernel module for ``name`` (``"cython"``, ``"python"`` or default)."""
    if name is None:
        name = BACKEND
    if name == "python":
        return _fallback
    if name == "cython":
        if _compiled is None:
            raise ImportError("compiled kernels are not built")
        return _compiled
    raise ValueError(f"unknown kernel backend {name!r}")


def pivot_loop(T, basis, n_enter, tol, max_iter):
    # exact (object-dtype) tableaux always take the Python path
    if _compiled is not None and T.dtype == float:
        return _compiled.pivot_loop(T, basis, n_enter, tol, max_iter)
    return _fallback.pivot_loop(T, basis, n_enter, tol, max_iter)


def pivot(T, basis, p, j):
    if _compiled is not None and T.dtype == float:
        return _compiled.pivot(T, basis, p, j)
    return _fallback.pivot(T, basis, p, j)


def active_set_vertices(E, f, A, b, s, sing_tol, feas_tol):
    mod = _compiled if _compiled is not None else _fallback
    return mod.active_set_vertices(E, f, A, b, s, sing_tol, feas_tol)
