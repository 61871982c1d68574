"""Trigonometric-polynomial boundary curves and their plane geometry.

A boundary is a closed curve sum_k d_k * exp(i*k*t), k in [-m, n], traced
once counterclockwise as t runs over [0, 2*pi). Corners of an ideal target
shape survive truncation as near-corners: sharp local dips of |z'(t)|.
"""

import numpy as np
from scipy.optimize import minimize_scalar
from shapely.geometry import LineString

from .errors import BoundaryError, ConfigError

TWO_PI = 2.0 * np.pi


class TrigBoundary:
    """Closed curve with complex Fourier coefficients d_k, k in [-m, n].

    Parameters
    ----------
    coeffs : mapping
        Integer frequency -> complex coefficient. Exact zeros are dropped;
        at least one positive frequency must remain.
    sample_spacing : float, optional
        Parameter step of the samples the curve was fitted from, when known.
    fit_residual : float, optional
        Max pointwise misfit of the truncated series against those samples.
    """

    def __init__(self, coeffs, sample_spacing=None, fit_residual=None):
        items = sorted((int(k), complex(d)) for k, d in coeffs.items() if d != 0)
        if not items or items[-1][0] < 1:
            raise ValueError("boundary needs at least one positive-frequency coefficient")
        self._ks = np.array([k for k, _ in items], dtype=np.int64)
        self._ds = np.array([d for _, d in items], dtype=np.complex128)
        self._ks.setflags(write=False)
        self._ds.setflags(write=False)
        self.sample_spacing = sample_spacing
        self.fit_residual = fit_residual

    @property
    def m(self):
        """Largest negative-frequency extent (0 if none)."""
        k0 = int(self._ks[0])
        return -k0 if k0 < 0 else 0

    @property
    def n(self):
        """Largest positive-frequency extent."""
        return int(self._ks[-1])

    @property
    def coeffs(self):
        return {int(k): complex(d) for k, d in zip(self._ks, self._ds)}

    def __call__(self, t):
        t = np.asarray(t, dtype=float)
        return np.exp(1j * t[..., None] * self._ks) @ self._ds

    def derivative(self, t, order=1):
        """Evaluate sum_k (i*k)^order d_k exp(i*k*t) for order 1 or 2."""
        if order not in (1, 2):
            raise ValueError(f"order must be 1 or 2, got {order!r}")
        t = np.asarray(t, dtype=float)
        fac = (1j * self._ks) ** order
        return np.exp(1j * t[..., None] * self._ks) @ (fac * self._ds)

    @classmethod
    def fit(cls, points, m, n):
        """Fit coefficients to uniformly spaced samples of a closed curve.

        Parameters
        ----------
        points : array_like
            At least 2*(m+n)+1 complex samples at parameters 2*pi*j/len(points),
            tracing the target boundary once counterclockwise.
        m, n : int
            Frequency extents of the truncated series.

        Returns
        -------
        TrigBoundary
            Fitted curve with ``fit_residual`` set to the max pointwise misfit.
            The fit must still be a simple, positively wound curve.
        """
        z = np.asarray(points, dtype=np.complex128).ravel()
        count = z.size
        need = 2 * (m + n) + 1
        if count < need:
            raise ConfigError(
                f"{count} samples below the Nyquist bound {need} for m={m}, n={n}"
            )
        coeff = np.fft.fft(z) / count
        ks = np.arange(-m, n + 1)
        d = {int(k): complex(coeff[k % count]) for k in ks}
        t = TWO_PI * np.arange(count) / count
        trial = cls(d, sample_spacing=TWO_PI / count)
        residual = float(np.max(np.abs(trial(t) - z)))
        out = cls(d, sample_spacing=TWO_PI / count, fit_residual=residual)
        validate(out)
        return out

    def __repr__(self):
        return f"TrigBoundary(m={self.m}, n={self.n}, terms={self._ks.size})"


class AnglePoint:
    """Corner marker: parameter t0 and interior angle lam * pi, 0 < lam < 1."""

    __slots__ = ("t0", "lam")

    def __init__(self, t0, lam):
        lam = float(lam)
        if not 0.0 < lam < 1.0:
            raise ValueError(f"interior-angle fraction must lie in (0, 1), got {lam}")
        object.__setattr__(self, "t0", float(np.mod(t0, TWO_PI)))
        object.__setattr__(self, "lam", lam)

    def __setattr__(self, name, value):
        raise AttributeError("AnglePoint is immutable")

    def __repr__(self):
        return f"AnglePoint(t0={self.t0:.6f}, lam={self.lam:.4f})"

    def __eq__(self, other):
        return (
            isinstance(other, AnglePoint)
            and self.t0 == other.t0
            and self.lam == other.lam
        )


def detect_corners(boundary, threshold=0.2, scan=8192, tangent_offset=None):
    """Locate near-corners as sharp local minima of |z'(t)|.

    A grid minimum below threshold * max|z'| is polished by bounded scalar
    minimization. The interior angle is estimated from one-sided tangents at
    t0 -/+ delta; candidates whose estimate falls outside (0, 1) are not
    corners in the acute sense and are dropped. Estimates are rough; callers
    may override both t0 and the angle.

    Returns a list of AnglePoint sorted by t0.
    """
    h = TWO_PI / scan
    t = h * np.arange(scan)
    speed = np.abs(boundary.derivative(t))
    cutoff = threshold * speed.max()
    if tangent_offset is None:
        # Tangents only settle to their one-sided limits outside the zone the
        # truncated series can resolve, so the offset tracks that length, not
        # the (usually much finer) sample spacing.
        resolution = TWO_PI / (2 * (boundary.m + boundary.n) + 1)
        spacing = boundary.sample_spacing or 0.0
        tangent_offset = max(2.0 * spacing, 3.0 * resolution)

    is_min = (speed < np.roll(speed, 1)) & (speed <= np.roll(speed, -1))
    found = []
    for i in np.nonzero(is_min & (speed < cutoff))[0]:
        res = minimize_scalar(
            lambda s: float(np.abs(boundary.derivative(s))),
            bounds=(t[i] - h, t[i] + h),
            method="bounded",
            options={"xatol": 1e-12},
        )
        t0 = float(np.mod(res.x, TWO_PI))
        before = boundary.derivative(t0 - tangent_offset)
        after = boundary.derivative(t0 + tangent_offset)
        turn = float(np.angle(after / before))
        lam = 1.0 - turn / np.pi
        if 0.0 < lam < 1.0:
            found.append(AnglePoint(t0, lam))
    found.sort(key=lambda c: c.t0)
    return found


def polyline_distance(vertices, queries, closed=True, chunk=128):
    """Distance from each query point to a polyline (complex coordinates)."""
    vertices = np.asarray(vertices, dtype=np.complex128)
    q = np.atleast_1d(np.asarray(queries, dtype=np.complex128))
    a = vertices
    b = np.roll(vertices, -1) if closed else None
    if not closed:
        a, b = vertices[:-1], vertices[1:]
    ab = b - a
    norm2 = np.abs(ab) ** 2
    norm2[norm2 == 0.0] = 1.0
    out = np.empty(q.size, dtype=float)
    for lo in range(0, q.size, chunk):
        qq = q[lo : lo + chunk, None]
        aq = qq - a[None, :]
        s = np.clip((aq * ab.conj()).real / norm2, 0.0, 1.0)
        out[lo : lo + chunk] = np.abs(aq - s * ab).min(axis=1)
    return out if np.ndim(queries) else float(out[0])


def polyline_winding(vertices, about=0.0, tol=None):
    """Winding number of a closed polyline about a point.

    vertices holds one full period (no repeated endpoint). Raises
    BoundaryError when the point sits on or numerically too close to
    the polyline for the angle increments to be trustworthy.
    """
    vertices = np.asarray(vertices, dtype=np.complex128)
    rel = vertices - about
    if tol is None:
        tol = 1e-9 * float(np.max(np.abs(rel)))
    if polyline_distance(vertices, about) < tol:
        raise BoundaryError("point too close to the curve for a winding number")
    steps = np.angle(np.roll(rel, -1) / rel)
    return int(round(float(steps.sum()) / TWO_PI))


def winding_number(boundary, point=0.0, samples=4096):
    """Winding number of the boundary curve about a point."""
    t = TWO_PI * np.arange(samples) / samples
    return polyline_winding(boundary(t), point)


def validate(boundary, samples=4096):
    """Check the three curve invariants; raise BoundaryError on failure.

    The curve must be simple (polyline guard), wind once counterclockwise
    about 0, and have a nowhere-vanishing derivative on a dense grid.
    """
    t = TWO_PI * np.arange(samples) / samples
    speed = np.abs(boundary.derivative(t))
    if speed.min() <= 1e-12 * speed.max():
        raise BoundaryError("boundary derivative vanishes on the grid")
    z = boundary(t)
    xy = np.column_stack([z.real, z.imag])
    ring = LineString(np.vstack([xy, xy[:1]]))
    if not ring.is_simple:
        raise BoundaryError("boundary polyline is self-intersecting")
    w = polyline_winding(z)
    if w != 1:
        raise BoundaryError(f"winding number about 0 is {w}, expected 1")


def boundary_to_dict(boundary, corners=None):
    """JSON-ready dict for a boundary (and optional corner markers)."""
    data = {
        "coeffs": [
            {"k": int(k), "re": float(d.real), "im": float(d.imag)}
            for k, d in sorted(boundary.coeffs.items())
        ]
    }
    if corners:
        data["corners"] = [{"t0": c.t0, "lambda": c.lam} for c in corners]
    return data


def boundary_from_dict(data):
    """Build (TrigBoundary, corners) from a boundary-spec dict.

    Accepts either explicit coefficients or raw samples plus extents:
    {"coeffs": [{"k", "re", "im"}, ...]} or
    {"samples": [[x, y], ...], "m": int, "n": int}, each with an optional
    "corners": [{"t0", "lambda"}, ...]. The curve is validated.
    """
    if not isinstance(data, dict):
        raise ConfigError("boundary spec must be a JSON object")
    if "coeffs" in data:
        try:
            coeffs = {
                int(e["k"]): complex(float(e["re"]), float(e["im"]))
                for e in data["coeffs"]
            }
        except (TypeError, KeyError, ValueError) as exc:
            raise ConfigError(f"malformed coeffs entry: {exc}") from exc
        try:
            boundary = TrigBoundary(coeffs)
        except ValueError as exc:
            raise ConfigError(str(exc)) from exc
        validate(boundary)
    elif "samples" in data:
        if "m" not in data or "n" not in data:
            raise ConfigError("sample-form boundary spec needs both 'm' and 'n'")
        pts = np.asarray(data["samples"], dtype=float)
        if pts.ndim != 2 or pts.shape[1] != 2:
            raise ConfigError("samples must be a list of [x, y] pairs")
        boundary = TrigBoundary.fit(
            pts[:, 0] + 1j * pts[:, 1], int(data["m"]), int(data["n"])
        )
    else:
        raise ConfigError("boundary spec needs either 'coeffs' or 'samples'")
    try:
        corners = [AnglePoint(e["t0"], e["lambda"]) for e in data.get("corners", [])]
    except (TypeError, KeyError, ValueError) as exc:
        raise ConfigError(f"malformed corners entry: {exc}") from exc
    return boundary, corners
