"""Boundary kernels of the integral equation and the periodic Hilbert formula.

For a simple closed curve z(t), factoring the chord gives

    z(tau) - z(t) = (exp(i*(tau - t)) - 1) * R(tau, t)

where R is a trigonometric polynomial in both arguments that never vanishes
when the curve is simple with nonvanishing derivative (R(t, t) = -i z'(t)).
Hence log|z(tau) - z(t)| = log(2*|sin((tau - t)/2)|) + log|R(tau, t)| and the
t-derivative of the first summand is -(1/2) cot((tau - t)/2). The singular
part is never discretized directly; it is integrated exactly in Fourier space
by the conjugate-function formula.
"""

from dataclasses import dataclass

import numpy as np

from ._backend import fill_kernel_grids
from .boundary import TWO_PI
from .errors import BoundaryError, ConfigError, NumericalError

PROBE = 1e-6


def _check_resolution(boundary, size):
    low = 4 * (boundary.m + boundary.n)
    if size < low or size & (size - 1) != 0:
        raise ConfigError(
            f"grid size must be a power of two and at least {low}, got {size}"
        )


def angle_kernel(boundary, tau, t):
    """Negated t-derivative of arg(z(tau) - z(t)).

    Equals Im[z'(t) / (z(tau) - z(t))] off the diagonal and the limit
    -Im[z''(t) / (2 z'(t))] at tau = t (mod 2*pi). For the unit circle the
    kernel is identically -1/2.
    """
    tau = np.asarray(tau, dtype=float)
    t = np.asarray(t, dtype=float)
    tau, t = np.broadcast_arrays(tau, t)
    diag = np.mod(tau - t, TWO_PI) == 0.0
    w = boundary(tau) - boundary(t)
    if np.any((np.abs(w) == 0.0) & ~diag):
        raise BoundaryError("coincident boundary points off the diagonal")
    zp = boundary.derivative(t)
    safe = np.where(diag, 1.0, w)
    out = np.where(diag, -(boundary.derivative(t, 2) / (2.0 * zp)).imag,
                   (zp / safe).imag)
    return float(out) if out.ndim == 0 else out


def _regular_factor(boundary, tau, t):
    """R(tau, t) and its t-derivative via partial geometric sums."""
    x = tau - t
    ks = boundary._ks
    ds = boundary._ds
    kmax = int(np.max(np.abs(ks)))
    ell = np.arange(kmax)
    basis = np.exp(1j * x[..., None] * ell)
    # cums[..., k-1] = sum_{l<k} e^{ilx}; dcums likewise with a factor i*l.
    cums = np.cumsum(basis, axis=-1)
    dcums = np.cumsum(basis * (1j * ell), axis=-1)
    r = np.zeros(x.shape, dtype=np.complex128)
    dr = np.zeros(x.shape, dtype=np.complex128)
    for k, d in zip(ks, ds):
        if k > 0:
            phase = d * np.exp(1j * k * t)
            r += phase * cums[..., k - 1]
            dr += phase * (1j * k * cums[..., k - 1] - dcums[..., k - 1])
        elif k < 0:
            phase = d * np.exp(1j * k * tau)
            r -= phase * cums[..., -k - 1]
            dr += phase * dcums[..., -k - 1]
    return r, dr


def log_kernel_regular(boundary, tau, t):
    """Regular part of d/dt log|z(tau) - z(t)| after the cotangent split.

    Returns d/dt log|R(tau, t)| = Re[dR/dt / R]. On the diagonal the
    analytic limit is replaced by the symmetric average of the values at
    tau = t - 1e-6 and tau = t + 1e-6.
    """
    tau = np.asarray(tau, dtype=float)
    t = np.asarray(t, dtype=float)
    tau, t = np.broadcast_arrays(tau, t)
    diag = np.mod(tau - t, TWO_PI) == 0.0
    if np.any(diag):
        out = np.empty(tau.shape, dtype=float)
        off = ~diag
        if np.any(off):
            out[off] = log_kernel_regular(boundary, tau[off], t[off])
        td = t[diag]
        lo = log_kernel_regular(boundary, td - PROBE, td)
        hi = log_kernel_regular(boundary, td + PROBE, td)
        out[diag] = 0.5 * (lo + hi)
        return float(out) if out.ndim == 0 else out
    r, dr = _regular_factor(boundary, tau, t)
    scale = float(np.sum(np.abs(boundary._ks) * np.abs(boundary._ds)))
    if np.any(np.abs(r) < 1e-12 * scale):
        raise NumericalError("regular chord factor vanishes (degenerate boundary)")
    out = (dr / r).real
    return float(out) if out.ndim == 0 else out


def conjugate_coefficients(a0, a, b):
    """Harmonic-conjugate mapping on real Fourier coefficients.

    a_l cos(l t) + b_l sin(l t) -> a_l sin(l t) - b_l cos(l t); the constant
    term maps to 0. Applying the map twice negates the zero-mean part.
    """
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    return 0.0, -b.copy(), a.copy()


def conjugate_samples(values):
    """Harmonic conjugate of uniformly sampled periodic data, via the FFT.

    The (unrepresentable) Nyquist mode of even-length inputs is dropped.
    """
    v = np.asarray(values, dtype=float)
    spec = np.fft.rfft(v)
    spec *= -1j
    spec[0] = 0.0
    if v.size % 2 == 0:
        spec[-1] = 0.0
    return np.fft.irfft(spec, n=v.size)


@dataclass(frozen=True)
class KernelGrid:
    """Angle kernel sampled on the (tau_i, t_j) product grid plus forcing."""

    nodes: np.ndarray
    matrix: np.ndarray
    forcing: np.ndarray


def kernel_grid(boundary, size):
    """Sample the angle kernel and the forcing vector on a uniform grid.

    size must be a power of two with size >= 4*(m + n) so that the kernels
    are resolved. Row index is tau, column index is t.
    """
    _check_resolution(boundary, size)
    nodes = TWO_PI * np.arange(size) / size
    z = boundary(nodes)
    zp = boundary.derivative(nodes)
    zpp = boundary.derivative(nodes, 2)
    try:
        grid_k, grid_l = fill_kernel_grids(z, zp, zpp, nodes)
    except ValueError as exc:
        raise BoundaryError(str(exc)) from exc
    lo = log_kernel_regular(boundary, nodes - PROBE, nodes)
    hi = log_kernel_regular(boundary, nodes + PROBE, nodes)
    np.fill_diagonal(grid_l, 0.5 * (lo + hi))
    slope = (zp / z).real
    forcing = conjugate_samples(slope) + (2.0 / size) * (slope @ grid_l)
    return KernelGrid(nodes=nodes, matrix=grid_k, forcing=forcing)


def forcing_samples(boundary, size):
    """Forcing term of the integral equation at the uniform grid nodes.

    Computed as the conjugate function of d/dtau log|z(tau)| (the exact
    Fourier-space image of the cotangent part) plus the trapezoid integral
    against the regular log kernel.
    """
    return kernel_grid(boundary, size).forcing
