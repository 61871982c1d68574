"""Compiled inner loops: kernel-grid fill and Cauchy-sum evaluation."""

import numpy as np

from cython.parallel import prange
from libc.math cimport tan


def fill_kernel_grids(const double complex[::1] z, const double complex[::1] zp,
                      const double complex[::1] zpp, const double[::1] nodes):
    # Rows are independent, so the fill runs one OpenMP thread per row
    # block; every entry is written exactly once, keeping the result
    # bit-for-bit identical to the serial order.
    cdef Py_ssize_t n = z.shape[0]
    grid_k = np.empty((n, n), dtype=np.float64)
    grid_l = np.empty((n, n), dtype=np.float64)
    cdef double[:, ::1] kv = grid_k
    cdef double[:, ::1] lv = grid_l
    cdef Py_ssize_t i, j
    cdef double complex w, r
    cdef double s
    cdef int degenerate = 0
    for i in prange(n, nogil=True, schedule="static"):
        for j in range(n):
            if i == j:
                continue
            w = z[i] - z[j]
            if w == 0:
                degenerate += 1
                continue
            # naive complex division; |w| is bounded away from the extremes
            # on a simple curve, so no scaling is needed
            s = 1.0 / (w.real * w.real + w.imag * w.imag)
            r = zp[j] * w.conjugate() * s
            kv[i, j] = r.imag
            lv[i, j] = -r.real + 0.5 / tan(0.5 * (nodes[i] - nodes[j]))
    with nogil:
        for i in range(n):
            r = zpp[i] / (2.0 * zp[i])
            kv[i, i] = -r.imag
            lv[i, i] = 0.0
    if degenerate:
        raise ValueError("coincident boundary points in kernel grid (curve not simple)")
    return grid_k, grid_l


def eval_cauchy(const double complex[::1] amp, const double complex[::1] unit,
                const double complex[::1] zetas):
    # Points are independent; each thread owns whole points, and the inner
    # summation order is fixed, so the result does not depend on the thread
    # count.
    cdef Py_ssize_t nq = amp.shape[0]
    cdef Py_ssize_t ng = zetas.shape[0]
    out = np.empty(ng, dtype=np.complex128)
    cdef double complex[::1] ov = out
    cdef Py_ssize_t g, j
    cdef double complex acc, d, zeta
    cdef double s
    for g in prange(ng, nogil=True, schedule="static"):
        zeta = zetas[g]
        acc = 0
        for j in range(nq):
            d = unit[j] - zeta
            s = 1.0 / (d.real * d.real + d.imag * d.imag)
            acc = acc + amp[j] * d.conjugate() * s
        ov[g] = acc
    return out


def eval_cauchy_pair(const double complex[::1] ampn, const double complex[::1] ampd,
                     const double complex[::1] unit, const double complex[::1] zetas):
    cdef Py_ssize_t nq = ampn.shape[0]
    cdef Py_ssize_t ng = zetas.shape[0]
    num = np.empty(ng, dtype=np.complex128)
    den = np.empty(ng, dtype=np.complex128)
    cdef double complex[::1] nv = num
    cdef double complex[::1] dv = den
    cdef Py_ssize_t g, j
    cdef double complex accn, accd, rec, d, zeta
    cdef double s
    for g in prange(ng, nogil=True, schedule="static"):
        zeta = zetas[g]
        accn = 0
        accd = 0
        for j in range(nq):
            d = unit[j] - zeta
            s = 1.0 / (d.real * d.real + d.imag * d.imag)
            rec = d.conjugate() * s
            accn = accn + ampn[j] * rec
            accd = accd + ampd[j] * rec
        nv[g] = accn
        dv[g] = accd
    return num, den
