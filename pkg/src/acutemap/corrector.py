"""Monotone spline repair of a folded boundary correspondence.

Near an acute corner the raw correspondence theta(t) can dip and lose
monotonicity (the true correspondence has a flat point there). The repair
replaces theta on a small interval around the corner parameter with a
strictly increasing spline that interpolates the raw values and slopes at
the interval ends and, in the cubic kind, is exactly flat at the corner.
"""

import numpy as np
from numpy.polynomial import polynomial as P
from scipy.optimize import brentq

from .boundary import TWO_PI
from .errors import FoldError, NumericalError, SplineMonotonicityError

HALF_PERIOD = np.pi


class MonotoneSpline:
    """Strictly increasing replacement for theta on [t0-eps1, t0+eps2].

    Two polynomial pieces in the local coordinate s = t - t0, with knots at
    {-eps1, 0, eps2} and value theta_star at s = 0. The cubic kind has a
    literally zero linear coefficient at s = 0; the linear kind waives the
    flat-point condition.
    """

    __slots__ = ("t0", "eps1", "eps2", "kind", "theta_star", "left", "right")

    def __init__(self, t0, eps1, eps2, kind, theta_star, left, right):
        self.t0 = float(t0)
        self.eps1 = float(eps1)
        self.eps2 = float(eps2)
        self.kind = kind
        self.theta_star = float(theta_star)
        self.left = np.asarray(left, dtype=float)
        self.right = np.asarray(right, dtype=float)

    def value_local(self, s):
        s = np.asarray(s, dtype=float)
        out = np.where(s < 0.0, P.polyval(s, self.left), P.polyval(s, self.right))
        return float(out) if out.ndim == 0 else out

    def slope_local(self, s):
        s = np.asarray(s, dtype=float)
        out = np.where(
            s < 0.0,
            P.polyval(s, P.polyder(self.left)),
            P.polyval(s, P.polyder(self.right)),
        )
        return float(out) if out.ndim == 0 else out

    def invert_local(self, phi):
        """Local parameter s with value_local(s) = phi, to 1e-12 in value.

        brentq is a bracketing solver, so the flat point of the cubic kind
        cannot throw it; out-of-range phi beyond a 1e-9 slack is an error.
        """
        lo = float(P.polyval(-self.eps1, self.left))
        hi = float(P.polyval(self.eps2, self.right))
        if phi < lo - 1e-9 or phi > hi + 1e-9:
            raise NumericalError(f"value {phi} outside the spline range [{lo}, {hi}]")
        phi = min(max(phi, lo), hi)
        if phi >= self.theta_star:
            coeffs, a, b = self.right, 0.0, self.eps2
        else:
            coeffs, a, b = self.left, -self.eps1, 0.0
        s = brentq(
            lambda u: P.polyval(u, coeffs) - phi,
            a,
            b,
            xtol=1e-14,
            rtol=8.9e-16,
            maxiter=200,
        )
        return float(s)

    def value(self, t):
        """Spline value at a global parameter inside the correction window."""
        s = np.mod(np.asarray(t, dtype=float) - self.t0 + np.pi, TWO_PI) - np.pi
        return self.value_local(s)

    def invert(self, phi):
        """Global parameter t in [t0-eps1, t0+eps2] with spline value phi."""
        return self.t0 + self.invert_local(phi)


def detect_fold(corr, t0, slope_floor=0.05, grid=8192, window=0.5):
    """Bracket the non-monotone dip of theta around a corner parameter.

    Scans theta'(t0 + s) on a dense symmetric grid. If no point within
    |s| <= window drops below slope_floor there is no fold and None is
    returned. Otherwise the interval starts as the hull of every sub-floor
    point in that neighbourhood (the dip is usually fragmented by
    truncation wiggles) and each end is pushed outward in grid steps until
    theta' clears the floor there, then both until the raw values rise
    across the interval. Returns (eps1, eps2), generally asymmetric.
    """
    step = TWO_PI / grid
    center = grid // 2
    offsets = (np.arange(grid) - center) * step
    slopes = corr.theta_prime(t0 + offsets)

    span = min(int(round(window / step)), center - 1)
    local = slopes[center - span : center + span + 1]
    below = np.nonzero(local < slope_floor)[0]
    if below.size == 0:
        return None
    lo = min(center - span + below[0], center)
    hi = max(center - span + below[-1], center)

    def _fail():
        raise FoldError(f"fold at t0={t0:.6f} not localizable within half a period")

    while slopes[lo] < slope_floor:
        lo -= 1
        if lo < 0 or -offsets[lo] > HALF_PERIOD:
            _fail()
    while slopes[hi] < slope_floor:
        hi += 1
        if hi >= grid or offsets[hi] > HALF_PERIOD:
            _fail()
    while corr.theta(t0 + offsets[hi]) <= corr.theta(t0 + offsets[lo]):
        lo -= 1
        hi += 1
        if lo < 0 or hi >= grid or offsets[hi] > HALF_PERIOD:
            _fail()
    return -offsets[lo], offsets[hi]


def build_spline(corr, t0, eps1, eps2, kind="cubic", theta_star=None):
    """Fit the monotone two-piece spline on [t0-eps1, t0+eps2].

    theta_star defaults to the midpoint of the raw endpoint values. The
    cubic pieces are Hermite cubics; a piece with secant slope D and
    endpoint slopes in [0, 3D] is nondecreasing, which is checked exactly
    and then re-verified by sampling (256 points per piece plus the
    critical point of the quadratic derivative). Violations raise
    SplineMonotonicityError so the caller can widen the interval and retry.
    """
    if kind not in ("cubic", "linear"):
        raise ValueError(f"spline kind must be 'cubic' or 'linear', got {kind!r}")
    if eps1 <= 0.0 or eps2 <= 0.0:
        raise ValueError("correction interval must have positive extent")
    va = float(corr.theta(t0 - eps1))
    vb = float(corr.theta(t0 + eps2))
    sa = float(corr.theta_prime(t0 - eps1))
    sb = float(corr.theta_prime(t0 + eps2))
    if vb <= va:
        raise SplineMonotonicityError(
            f"degenerate interval: theta({t0:+.4f}+{eps2:.4f}) <= theta(-{eps1:.4f})"
        )
    if sa < 0.0 or sb < 0.0:
        raise SplineMonotonicityError("raw slope negative at an interval endpoint")
    if theta_star is None:
        star = 0.5 * (va + vb)
        if kind == "cubic":
            # A Hermite piece with end slopes (d, 0) is monotone iff
            # d <= 3 * secant, so the flat value must satisfy
            # va + sa*eps1/3 <= star <= vb - sb*eps2/3. The midpoint is
            # projected into that interval, kept off its ends so the
            # slope stays strictly positive away from t0.
            lo = va + sa * eps1 / 3.0
            hi = vb - sb * eps2 / 3.0
            if lo > hi:
                raise SplineMonotonicityError(
                    "endpoint slopes exceed the monotone budget for any flat value"
                )
            pad = 0.02 * (hi - lo)
            star = min(max(star, lo + pad), hi - pad)
    else:
        star = float(theta_star)
    if not va < star < vb:
        raise SplineMonotonicityError("theta_star outside the endpoint values")

    if kind == "linear":
        left = np.array([star, (star - va) / eps1])
        right = np.array([star, (vb - star) / eps2])
    else:
        sec_l = (star - va) / eps1
        sec_r = (vb - star) / eps2
        if sa > 3.0 * sec_l or sb > 3.0 * sec_r:
            raise SplineMonotonicityError(
                "endpoint slope exceeds three times the secant slope"
            )
        # Hermite cubic through (-eps1, va) slope sa and (0, star) slope 0,
        # written with ascending coefficients about s = 0 so the linear
        # term is exactly zero.
        left = np.array(
            [
                star,
                0.0,
                3.0 * (va - star) / eps1**2 + sa / eps1,
                sa / eps1**2 + 2.0 * (va - star) / eps1**3,
            ]
        )
        right = np.array(
            [
                star,
                0.0,
                3.0 * (vb - star) / eps2**2 - sb / eps2,
                sb / eps2**2 - 2.0 * (vb - star) / eps2**3,
            ]
        )

    spline = MonotoneSpline(t0, eps1, eps2, kind, star, left, right)
    for coeffs, a, b in ((left, -eps1, 0.0), (right, 0.0, eps2)):
        der = P.polyder(coeffs)
        samples = list(np.linspace(a, b, 256))
        if der.size == 3 and der[2] != 0.0:
            crit = -der[1] / (2.0 * der[2])
            if a < crit < b:
                samples.append(crit)
        if np.min(P.polyval(np.asarray(samples), der)) < -1e-12:
            raise SplineMonotonicityError("spline derivative dips negative")
    return spline


def _settle_window(corr, t0, r1, r2, inner1, inner2, kind, points=21):
    """Pick window ends near (r1, r2) with the best monotonicity margin.

    Candidate radii per side run from the negative-slope hull (the window
    must keep every non-monotone point inside) out to 1.3x the requested
    radius. A pair is feasible when the rise is positive and, for the
    cubic kind, the joint monotone-Hermite budget rise - (d1*eps1 +
    d2*eps2)/3 has slack; the tightest feasible window wins so the
    replaced stretch of boundary stays as short as possible. Returns
    None when every candidate pair is infeasible.
    """
    c1 = np.linspace(max(inner1, 0.4 * r1), max(1.3 * r1, inner1), points)
    c2 = np.linspace(max(inner2, 0.4 * r2), max(1.3 * r2, inner2), points)
    va = corr.theta(t0 - c1)
    vb = corr.theta(t0 + c2)
    da = corr.theta_prime(t0 - c1)
    db = corr.theta_prime(t0 + c2)
    rise = vb[None, :] - va[:, None]
    if kind == "cubic":
        margin = rise - (da * c1)[:, None] / 3.0 - (db * c2)[None, :] / 3.0
    else:
        margin = rise.copy()
    feasible = (margin > 0.0) & (rise > 0.0)
    feasible &= (da >= 0.0)[:, None] & (db >= 0.0)[None, :]
    if not feasible.any():
        return None
    span = c1[:, None] + c2[None, :]
    span = np.where(feasible, span, np.inf)
    i, j = np.unravel_index(int(np.argmin(span)), span.shape)
    return float(c1[i]), float(c2[j])


def correct_corner(corr, t0, kind="cubic", slope_floor=0.05, max_retries=8):
    """Detect and repair the fold at one corner.

    Returns (spline, report). spline is None when no fold is present. Each
    attempt settles the window ends onto the best nearby junction pair,
    never inside the negative-slope hull; when no pair is feasible the
    interval is widened by 25% and retried, at most max_retries times.
    """
    found = detect_fold(corr, t0, slope_floor=slope_floor)
    if found is None:
        return None, {"t0": float(t0), "fold": False, "kind": kind, "retries": 0}
    base1, base2 = found

    step = TWO_PI / 8192
    off = np.arange(-base1, base2 + step, step)
    neg = off[corr.theta_prime(t0 + off) < 0.0]
    inner1 = -neg.min() + 2.0 * step if neg.size and neg.min() < 0.0 else 2.0 * step
    inner2 = neg.max() + 2.0 * step if neg.size and neg.max() > 0.0 else 2.0 * step

    last = None
    for attempt in range(max_retries + 1):
        scale = 1.25**attempt
        if max(base1, base2) * scale > HALF_PERIOD:
            raise NumericalError(
                f"correction interval at t0={t0:.6f} grew past half a period"
            ) from last
        settled = _settle_window(
            corr, t0, base1 * scale, base2 * scale, inner1, inner2, kind
        )
        if settled is None:
            last = SplineMonotonicityError(
                "no feasible junction pair at this window scale"
            )
            continue
        eps1, eps2 = settled
        try:
            spline = build_spline(corr, t0, eps1, eps2, kind)
            break
        except SplineMonotonicityError as exc:
            last = exc
    else:
        raise NumericalError(
            f"no monotone spline near t0={t0:.6f} after {max_retries} "
            f"widenings: {last}"
        ) from last
    return spline, {
        "t0": float(t0),
        "fold": True,
        "eps1": float(eps1),
        "eps2": float(eps2),
        "kind": kind,
        "theta_star": spline.theta_star,
        "retries": attempt,
    }


class CorrectedCorrespondence:
    """Piecewise correspondence: raw outside the windows, splines inside."""

    kind = "corrected"

    def __init__(self, raw, splines):
        starts = sorted(
            (np.mod(s.t0 - s.eps1, TWO_PI), s.eps1 + s.eps2) for s in splines
        )
        for i, (s0, len0) in enumerate(starts):
            if len0 >= TWO_PI:
                raise NumericalError("correction interval covers the whole period")
            if len(starts) > 1:
                nxt = starts[(i + 1) % len(starts)][0]
                if i + 1 == len(starts):
                    nxt += TWO_PI
                if s0 + len0 > nxt:
                    raise NumericalError(
                        "correction intervals overlap; corners are under-resolved"
                    )
        self.raw = raw
        self.splines = list(splines)

    @property
    def boundary(self):
        return self.raw.boundary

    @property
    def solution(self):
        return self.raw.solution

    def _windows(self, t):
        """Local offsets and masks of t against each correction window."""
        t = np.asarray(t, dtype=float)
        for s in self.splines:
            off = np.mod(t - s.t0 + np.pi, TWO_PI) - np.pi
            yield s, off, (off >= -s.eps1) & (off <= s.eps2)

    def theta(self, t):
        t = np.asarray(t, dtype=float)
        out = np.asarray(self.raw.theta(t), dtype=float).copy()
        flat = np.atleast_1d(out)
        tt = np.atleast_1d(t)
        for s, off, mask in self._windows(tt):
            if np.any(mask):
                flat[mask] = s.value_local(off[mask]) + (tt[mask] - s.t0 - off[mask])
        return float(flat[0]) if out.ndim == 0 else flat.reshape(out.shape)

    def theta_prime(self, t):
        t = np.asarray(t, dtype=float)
        out = np.asarray(self.raw.theta_prime(t), dtype=float).copy()
        flat = np.atleast_1d(out)
        tt = np.atleast_1d(t)
        for s, off, mask in self._windows(tt):
            if np.any(mask):
                flat[mask] = s.slope_local(off[mask])
        return float(flat[0]) if out.ndim == 0 else flat.reshape(out.shape)


def apply_corrections(corr, corners, kind="cubic", slope_floor=0.05, max_retries=8):
    """Run correct_corner over the corner parameters and combine the results.

    corners holds floats t0 or (t0, kind) pairs; pairs override the default
    spline kind. Returns (correspondence, reports) where the correspondence
    is the input unchanged when nothing folded.
    """
    splines = []
    reports = []
    for item in corners:
        if isinstance(item, tuple):
            t0, item_kind = item
        else:
            t0, item_kind = item, kind
        spline, report = correct_corner(
            corr, float(t0), kind=item_kind, slope_floor=slope_floor,
            max_retries=max_retries,
        )
        if spline is not None:
            splines.append(spline)
        reports.append(report)
    if not splines:
        return corr, reports
    return CorrectedCorrespondence(corr, splines), reports


def monotonicity_report(corr, samples=16384):
    """Dense-grid check that theta is strictly increasing with span 2*pi."""
    t = np.linspace(0.0, TWO_PI, samples + 1)
    th = corr.theta(t)
    steps = np.diff(th)
    return {
        "monotone": bool(steps.min() > 0.0),
        "min_step": float(steps.min()),
        "span": float(th[-1] - th[0]),
    }
