"""Pure-numpy kernel implementations (used when the extension is unavailable)."""

import numpy as np


def bilinear_gather_flat(values, x0, dx, y0, dy, xq, yq):
    nx, ny = values.shape
    u = (xq - x0) / dx
    v = (yq - y0) / dy
    inside = (u >= 0.0) & (u <= nx - 1) & (v >= 0.0) & (v <= ny - 1)
    i0 = np.clip(u.astype(np.intp), 0, nx - 2)
    j0 = np.clip(v.astype(np.intp), 0, ny - 2)
    tx = np.clip(u - i0, 0.0, 1.0)
    ty = np.clip(v - j0, 0.0, 1.0)
    out = ((1 - tx) * (1 - ty) * values[i0, j0]
           + tx * (1 - ty) * values[i0 + 1, j0]
           + (1 - tx) * ty * values[i0, j0 + 1]
           + tx * ty * values[i0 + 1, j0 + 1])
    out[~inside] = 0
    return out


def linear_gather_flat(values, x0, dx, xq):
    n = values.shape[0]
    u = (xq - x0) / dx
    inside = (u >= 0.0) & (u <= n - 1)
    i0 = np.clip(u.astype(np.intp), 0, n - 2)
    t = np.clip(u - i0, 0.0, 1.0)
    out = (1 - t) * values[i0] + t * values[i0 + 1]
    out[~inside] = 0
    return out
