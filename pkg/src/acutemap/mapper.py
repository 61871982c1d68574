"""Cauchy-integral evaluation of the approximate disk map.

With the boundary correspondence theta in hand, the map is the Cauchy
integral of the boundary values z(t) attached to the circle points
exp(i*theta(t)). All evaluations reduce to sums amp_j / (unit_j - zeta)
over fixed quadrature nodes, so a DiskMap precomputes (amp, unit) once and
is read-only afterwards; point batches may be evaluated by parallel workers.

Each sum is normalized by the same quadrature applied to the constant
boundary value 1, whose exact Cauchy integral is 1 inside the disk. The
ratio cancels the trapezoid aliasing term that otherwise grows like
|zeta|**nq near the rim, keeping the whole trusted region accurate.

For a corrected correspondence the smooth part of the circle is covered by
the uniform parameter grid restricted to the complement of the correction
windows (trapezoid weights at the cut ends), and each window contributes a
uniform grid in the image angle phi itself, with the window parametrized by
the spline inverse t(phi). Together the node sets cover the image circle
exactly once.
"""

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from ._backend import eval_cauchy_pair
from .boundary import TWO_PI, polyline_distance, polyline_winding
from .errors import ConfigError, TrustedRegionError


@dataclass(frozen=True)
class MapReport:
    """Solution-quality metrics of a DiskMap."""

    f0_abs: float
    boundary_dev: float
    winding: int
    cr_residual: float

    def to_dict(self):
        return {
            "f0_abs": float(self.f0_abs),
            "boundary_dev": float(self.boundary_dev),
            "winding": int(self.winding),
            "cr_residual": float(self.cr_residual),
        }


def _trapezoid_weights(nodes):
    gaps = np.diff(nodes)
    w = np.empty(nodes.size)
    w[0] = 0.5 * gaps[0]
    w[-1] = 0.5 * gaps[-1]
    w[1:-1] = 0.5 * (gaps[:-1] + gaps[1:])
    return w


class DiskMap:
    """Evaluator for the approximate conformal map on |zeta| <= 1 - delta_rim.

    Parameters
    ----------
    correspondence : RawCorrespondence or CorrectedCorrespondence
    nq : int
        Quadrature nodes for the parameter-space (smooth) integral.
    nq_spline : int
        Image-angle nodes per correction window.
    delta_rim : float
        Margin of the trusted evaluation region against the unit circle.
    """

    def __init__(self, correspondence, nq=1024, nq_spline=256, delta_rim=5e-3):
        if nq < 16 or nq_spline < 8:
            raise ConfigError("quadrature sizes too small to mean anything")
        if not 0.0 < delta_rim < 1.0:
            raise ConfigError(f"delta_rim must lie in (0, 1), got {delta_rim}")
        self.correspondence = correspondence
        self.boundary = correspondence.boundary
        self.nq = int(nq)
        self.nq_spline = int(nq_spline)
        self.delta_rim = float(delta_rim)
        if correspondence.kind == "corrected":
            amp, amp_one, unit = self._corrected_nodes(correspondence)
        else:
            amp, amp_one, unit = self._raw_nodes(correspondence)
        self._amp = amp
        self._amp_one = amp_one
        self._unit = unit

    def _raw_nodes(self, corr):
        t = TWO_PI * np.arange(self.nq) / self.nq
        theta = corr.theta(t)
        unit = np.exp(1j * theta)
        amp_one = unit * corr.theta_prime(t) / self.nq
        return self.boundary(t) * amp_one, amp_one, unit

    def _corrected_nodes(self, corr):
        raw = corr.raw
        splines = sorted(corr.splines, key=lambda s: np.mod(s.t0 - s.eps1, TWO_PI))
        starts = [np.mod(s.t0 - s.eps1, TWO_PI) for s in splines]
        amps = []
        ones = []
        units = []
        step = TWO_PI / self.nq
        for i, s in enumerate(splines):
            lo = starts[i] + s.eps1 + s.eps2
            hi = starts[(i + 1) % len(splines)] + (TWO_PI if i + 1 == len(splines) else 0.0)
            kk = np.arange(int(np.floor(lo / step)) + 1, int(np.ceil(hi / step)))
            inner = kk * step
            inner = inner[(inner > lo + 1e-12) & (inner < hi - 1e-12)]
            nodes = np.concatenate([[lo], inner, [hi]])
            w = _trapezoid_weights(nodes)
            theta = raw.theta(nodes)
            unit = np.exp(1j * theta)
            one = unit * raw.theta_prime(nodes) * w / TWO_PI
            amps.append(self.boundary(nodes) * one)
            ones.append(one)
            units.append(unit)
        for s in splines:
            phi_a = s.value_local(-s.eps1)
            phi_b = s.value_local(s.eps2)
            phi = np.linspace(phi_a, phi_b, self.nq_spline)
            w = np.full(self.nq_spline, phi[1] - phi[0])
            w[0] *= 0.5
            w[-1] *= 0.5
            local = np.array([s.invert_local(p) for p in phi])
            unit = np.exp(1j * phi)
            one = unit * w / TWO_PI
            amps.append(self.boundary(s.t0 + local) * one)
            ones.append(one)
            units.append(unit)
        return np.concatenate(amps), np.concatenate(ones), np.concatenate(units)

    @property
    def trusted_radius(self):
        return 1.0 - self.delta_rim

    def map_points(self, zetas, workers=1):
        """Map an array of points inside the trusted region.

        Raises TrustedRegionError naming the offending indices when any
        point lies beyond |zeta| = 1 - delta_rim.
        """
        z = np.asarray(zetas, dtype=np.complex128)
        flat = z.ravel()
        bad = np.nonzero(np.abs(flat) > self.trusted_radius + 1e-12)[0]
        if bad.size:
            shown = ", ".join(str(i) for i in bad[:8])
            more = "" if bad.size <= 8 else f" (+{bad.size - 8} more)"
            raise TrustedRegionError(
                f"{bad.size} points outside |zeta| <= {self.trusted_radius:.6f}: "
                f"indices {shown}{more}"
            )
        if workers > 1 and flat.size > 1:
            chunks = np.array_split(flat, workers)
            with ThreadPoolExecutor(max_workers=workers) as pool:
                parts = list(
                    pool.map(
                        lambda c: eval_cauchy_pair(
                            self._amp, self._amp_one, self._unit, c
                        ),
                        chunks,
                    )
                )
            num = np.concatenate([p[0] for p in parts])
            den = np.concatenate([p[1] for p in parts])
        else:
            num, den = eval_cauchy_pair(self._amp, self._amp_one, self._unit, flat)
        return (num / den).reshape(z.shape)

    def map_point(self, zeta):
        """Map a single point; complex result."""
        return complex(self.map_points(np.array([zeta]))[0])

    def verify(self, angles=1024, boundary_samples=4096, fd_step=1e-4):
        """Collect the standard acceptance metrics.

        boundary_dev is the max distance of the mapped circle of radius
        1 - delta_rim to a dense boundary polyline; winding is that image's
        winding about 0; cr_residual is the max central-difference
        Cauchy-Riemann defect |df/dx + i df/dy| over a fixed interior set.
        """
        rim = self.trusted_radius * np.exp(
            1j * TWO_PI * np.arange(angles) / angles
        )
        image = self.map_points(rim)
        curve = self.boundary(TWO_PI * np.arange(boundary_samples) / boundary_samples)
        dev = float(polyline_distance(curve, image).max())
        wind = polyline_winding(image, 0.0)
        f0 = abs(self.map_point(0.0))
        rr = np.array([0.25, 0.5, 0.75])
        aa = TWO_PI * np.arange(24) / 24 + 0.1
        pts = (rr[:, None] * np.exp(1j * aa)[None, :]).ravel()
        h = fd_step
        fx = (self.map_points(pts + h) - self.map_points(pts - h)) / (2.0 * h)
        fy = (self.map_points(pts + 1j * h) - self.map_points(pts - 1j * h)) / (2.0 * h)
        cr = float(np.max(np.abs(fx + 1j * fy)))
        return MapReport(f0_abs=f0, boundary_dev=dev, winding=wind, cr_residual=cr)
