"""Hot-loop kernels with a compiled core and a numpy fallback.

The compiled extension is optional. Set ACUTEMAP_PURE_PYTHON=1 to force the
numpy path even when the extension built; both implementations must agree to
rounding error and are tested against each other.
"""

import os
import warnings

import numpy as np

try:
    from . import _speedups

    HAVE_EXTENSION = True
except ImportError:
    _speedups = None
    HAVE_EXTENSION = False

# Unset or "0" -> prefer the extension, anything else -> force numpy.
USE_EXTENSION = HAVE_EXTENSION and os.environ.get(
    "ACUTEMAP_PURE_PYTHON", "0"
).strip() in ("", "0")

if not HAVE_EXTENSION:
    warnings.warn(
        "acutemap._speedups is not built; using the slower numpy kernels",
        RuntimeWarning,
        stacklevel=2,
    )


def fill_kernel_grids_numpy(z, zp, zpp, nodes):
    """Angle kernel and regular log kernel on the full (tau_i, t_j) grid.

    Row index i is tau, column index j is t. Diagonals: the angle kernel gets
    its analytic limit, the log kernel 0.0 (the caller overwrites it with the
    probe average, which needs the series form of the regular factor).
    """
    w = z[:, None] - z[None, :]
    np.fill_diagonal(w, 1.0)
    if np.min(np.abs(w)) == 0.0:
        raise ValueError("coincident boundary points in kernel grid (curve not simple)")
    ratio = zp[None, :] / w
    x = nodes[:, None] - nodes[None, :]
    np.fill_diagonal(x, 1.0)
    grid_k = ratio.imag.copy()
    grid_l = -ratio.real + 0.5 / np.tan(0.5 * x)
    np.fill_diagonal(grid_k, -(zpp / (2.0 * zp)).imag)
    np.fill_diagonal(grid_l, 0.0)
    return grid_k, grid_l


def eval_cauchy_numpy(amp, unit, zetas, chunk=256):
    """out[g] = sum_j amp[j] / (unit[j] - zetas[g]), chunked to bound memory."""
    zetas = np.ascontiguousarray(zetas, dtype=np.complex128)
    out = np.empty(zetas.size, dtype=np.complex128)
    for lo in range(0, zetas.size, chunk):
        denom = unit[None, :] - zetas[lo : lo + chunk, None]
        out[lo : lo + chunk] = (1.0 / denom) @ amp
    return out


def eval_cauchy_pair_numpy(ampn, ampd, unit, zetas, chunk=256):
    """Numerator and denominator sums sharing one reciprocal per node pair."""
    zetas = np.ascontiguousarray(zetas, dtype=np.complex128)
    num = np.empty(zetas.size, dtype=np.complex128)
    den = np.empty(zetas.size, dtype=np.complex128)
    for lo in range(0, zetas.size, chunk):
        rec = 1.0 / (unit[None, :] - zetas[lo : lo + chunk, None])
        num[lo : lo + chunk] = rec @ ampn
        den[lo : lo + chunk] = rec @ ampd
    return num, den


def fill_kernel_grids(z, zp, zpp, nodes):
    z = np.ascontiguousarray(z, dtype=np.complex128)
    zp = np.ascontiguousarray(zp, dtype=np.complex128)
    zpp = np.ascontiguousarray(zpp, dtype=np.complex128)
    nodes = np.ascontiguousarray(nodes, dtype=np.float64)
    if USE_EXTENSION:
        return _speedups.fill_kernel_grids(z, zp, zpp, nodes)
    return fill_kernel_grids_numpy(z, zp, zpp, nodes)


def eval_cauchy(amp, unit, zetas):
    amp = np.ascontiguousarray(amp, dtype=np.complex128)
    unit = np.ascontiguousarray(unit, dtype=np.complex128)
    zetas = np.ascontiguousarray(zetas, dtype=np.complex128)
    if USE_EXTENSION:
        return _speedups.eval_cauchy(amp, unit, zetas)
    return eval_cauchy_numpy(amp, unit, zetas)


def eval_cauchy_pair(ampn, ampd, unit, zetas):
    ampn = np.ascontiguousarray(ampn, dtype=np.complex128)
    ampd = np.ascontiguousarray(ampd, dtype=np.complex128)
    unit = np.ascontiguousarray(unit, dtype=np.complex128)
    zetas = np.ascontiguousarray(zetas, dtype=np.complex128)
    if USE_EXTENSION:
        return _speedups.eval_cauchy_pair(ampn, ampd, unit, zetas)
    return eval_cauchy_pair_numpy(ampn, ampd, unit, zetas)
