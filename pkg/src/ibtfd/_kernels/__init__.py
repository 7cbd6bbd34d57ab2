"""Interpolation kernels: compiled core with a pure-numpy fallback.

The Cython extension is selected automatically when present; set the
environment variable ``IBTFD_PURE_PYTHON=1`` to force the fallback.
"""

import os

import numpy as np

from . import _fallback

if os.environ.get("IBTFD_PURE_PYTHON"):
    _impl = _fallback
    BACKEND = "python"
else:
    try:
        from . import _core as _impl
        BACKEND = "cython"
    except ImportError:
        _impl = _fallback
        BACKEND = "python"


def _as_field(values):
    values = np.ascontiguousarray(values)
    if values.dtype == np.float64 or values.dtype == np.complex128:
        return values
    if np.iscomplexobj(values):
        return np.ascontiguousarray(values, dtype=np.complex128)
    return np.ascontiguousarray(values, dtype=np.float64)


def bilinear_gather(values, x0, dx, y0, dy, xq, yq):
    """Bilinear interpolation of a 2D field at query points; 0 outside the grid.

    ``values[i, j]`` lives at (x0 + i*dx, y0 + j*dy). Query arrays may have
    any (common) shape; the result has that shape and the field's dtype.
    """
    values = _as_field(values)
    xq = np.ascontiguousarray(xq, dtype=np.float64)
    yq = np.ascontiguousarray(yq, dtype=np.float64)
    if xq.shape != yq.shape:
        raise ValueError("query coordinate arrays must have the same shape")
    flat = _impl.bilinear_gather_flat(values, float(x0), float(dx),
                                      float(y0), float(dy),
                                      xq.ravel(), yq.ravel())
    return flat.reshape(xq.shape)


def linear_gather(values, x0, dx, xq):
    """Linear interpolation of a 1D array at query points; 0 outside the grid."""
    values = _as_field(values)
    xq = np.ascontiguousarray(xq, dtype=np.float64)
    flat = _impl.linear_gather_flat(values, float(x0), float(dx), xq.ravel())
    return flat.reshape(xq.shape)
