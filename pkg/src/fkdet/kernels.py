"""Backend selection for the hot kernels.

The compiled extension ``fkdet._kernels`` is used when it imports; otherwise,
or when ``FKDET_PURE_PYTHON`` is set to a non-empty value, the numpy versions
in ``fkdet._pykernels`` are used.
"""
import importlib
import os

from . import _pykernels

BACKEND = "python"
_impl = _pykernels
if not os.environ.get("FKDET_PURE_PYTHON"):
    try:
        _impl = importlib.import_module("fkdet._kernels")
        BACKEND = "compiled"
    except ImportError:  # extension not built
        pass


def backend(name=None):
    """Return the kernel module for ``name`` ("compiled", "python") or the active one."""
    if name is None:
        return _impl
    if name == "python":
        return _pykernels
    if name == "compiled":
        return importlib.import_module("fkdet._kernels")
    raise ValueError(f"unknown backend {name!r}")


def levinson_logdet(c):
    return _impl.levinson_logdet(c)


def aberth(coeffs, z0, tol, maxiter):
    return _impl.aberth(coeffs, z0, tol, maxiter)


def relation_discrepancy(succ1, succ2, lmax):
    return _impl.relation_discrepancy(succ1, succ2, lmax)


def eval_points(exps, coeffs, thetas):
    return _impl.eval_points(exps, coeffs, thetas)
