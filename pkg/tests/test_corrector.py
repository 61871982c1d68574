import numpy as np
import pytest
from numpy.polynomial import polynomial as P

from acutemap import (
    CorrectedCorrespondence,
    FoldError,
    NumericalError,
    SplineMonotonicityError,
    apply_corrections,
    build_spline,
    correct_corner,
    detect_fold,
    monotonicity_report,
)

TWO_PI = 2.0 * np.pi


class WavyLine:
    """theta(t) = t + a sin(2(t - c)); folds at c + pi/2 and c + 3pi/2 when a > 1/2."""

    def __init__(self, a, c=1.0):
        self.a = a
        self.c = c

    def theta(self, t):
        t = np.asarray(t, dtype=float)
        out = t + self.a * np.sin(2.0 * (t - self.c))
        return float(out) if out.ndim == 0 else out

    def theta_prime(self, t):
        t = np.asarray(t, dtype=float)
        out = 1.0 + 2.0 * self.a * np.cos(2.0 * (t - self.c))
        return float(out) if out.ndim == 0 else out


class PolyStub:
    """theta given as a polynomial in t - t0; for endpoint-driven branches."""

    def __init__(self, coeffs, t0=2.0):
        self.coeffs = np.asarray(coeffs, dtype=float)
        self.t0 = t0

    def theta(self, t):
        return P.polyval(np.asarray(t, dtype=float) - self.t0, self.coeffs)

    def theta_prime(self, t):
        return P.polyval(np.asarray(t, dtype=float) - self.t0, P.polyder(self.coeffs))


class Line:
    def theta(self, t):
        return np.asarray(t, dtype=float) + 0.0

    def theta_prime(self, t):
        return np.ones_like(np.asarray(t, dtype=float))


DIP = 1.0 + np.pi / 2  # fold parameter of WavyLine(a > 0.5, c=1.0)


class TestDetectFold:
    def test_brackets_symmetric_dip(self):
        # theta' = 1 - 1.2 cos(2s) around the dip; values rise across the
        # bracket once 2 eps > 1.2 sin(2 eps), at eps ~ 0.514
        duck = WavyLine(0.6)
        eps1, eps2 = detect_fold(duck, DIP)
        assert eps1 == pytest.approx(0.514, abs=0.01)
        assert eps2 == pytest.approx(0.514, abs=0.01)
        assert duck.theta_prime(DIP - eps1) >= 0.05
        assert duck.theta_prime(DIP + eps2) >= 0.05
        assert duck.theta(DIP + eps2) > duck.theta(DIP - eps1)

    def test_no_fold_returns_none(self, circle_raw):
        assert detect_fold(WavyLine(0.2), DIP) is None
        assert detect_fold(circle_raw, 1.0) is None

    def test_everywhere_flat_fails(self):
        crawl = PolyStub([0.0, 0.01])
        with pytest.raises(FoldError, match="half a period"):
            detect_fold(crawl, 2.0)

    def test_wraps_across_period_start(self):
        wrap = WavyLine(0.6, c=0.05 - np.pi / 2)
        eps1, eps2 = detect_fold(wrap, 0.05)
        assert eps1 == pytest.approx(0.514, abs=0.01)
        assert eps2 == pytest.approx(0.514, abs=0.01)


class TestBuildSpline:
    def frozen(self):
        # theta(t) = 1.1 + (t - 1) + 0.5/(10 pi) sin(10 pi (t - 1)) hits
        # values 1.0, 1.2 and slopes 0.5, 0.5 at t = 0.9, 1.1
        b = 0.5 / (10.0 * np.pi)

        class Frozen:
            def theta(self, t):
                return 1.1 + (t - 1.0) + b * np.sin(10.0 * np.pi * (t - 1.0))

            def theta_prime(self, t):
                return 1.0 + 10.0 * np.pi * b * np.cos(10.0 * np.pi * (t - 1.0))

        return Frozen()

    def test_frozen_cubic_coefficients(self):
        # star = midpoint 1.1; pieces derived by hand from the Hermite data
        # (va, sa) = (1.0, 0.5), (vb, sb) = (1.2, 0.5), eps = 0.1:
        # left c2 = 3(va-star)/eps^2 + sa/eps = -25, c3 = sa/eps^2 +
        # 2(va-star)/eps^3 = -150; right mirrors with +25, -150
        sp = build_spline(self.frozen(), 1.0, 0.1, 0.1, kind="cubic")
        assert sp.theta_star == pytest.approx(1.1, abs=1e-12)
        assert np.allclose(sp.left, [1.1, 0.0, -25.0, -150.0], atol=1e-9)
        assert np.allclose(sp.right, [1.1, 0.0, 25.0, -150.0], atol=1e-9)

    def test_flat_point_is_exact(self):
        sp = build_spline(self.frozen(), 1.0, 0.1, 0.1, kind="cubic")
        assert sp.left[1] == 0.0
        assert sp.right[1] == 0.0
        assert sp.slope_local(0.0) == 0.0

    def test_interpolates_values_and_slopes(self):
        fr = self.frozen()
        for kind in ("cubic", "linear"):
            sp = build_spline(fr, 1.0, 0.1, 0.1, kind=kind)
            assert sp.value_local(-0.1) == pytest.approx(1.0, abs=1e-12)
            assert sp.value_local(0.1) == pytest.approx(1.2, abs=1e-12)
            if kind == "cubic":
                assert sp.slope_local(-0.1) == pytest.approx(0.5, abs=1e-9)
                assert sp.slope_local(0.1) == pytest.approx(0.5, abs=1e-9)

    def test_strictly_increasing(self):
        sp = build_spline(self.frozen(), 1.0, 0.1, 0.1, kind="cubic")
        s = np.linspace(-0.1, 0.1, 1001)
        assert np.all(np.diff(sp.value_local(s)) > 0.0)

    def test_global_parameter_wraps(self):
        sp = build_spline(self.frozen(), 1.0, 0.1, 0.1, kind="cubic")
        for s in (-0.07, 0.02):
            want = sp.value_local(s)
            assert sp.value(1.0 + s) == pytest.approx(want, abs=1e-12)
            assert sp.value(1.0 + s + TWO_PI) == pytest.approx(want, abs=1e-12)
            assert sp.value(1.0 + s - TWO_PI) == pytest.approx(want, abs=1e-12)

    def test_invert_round_trips_in_value(self):
        for kind in ("cubic", "linear"):
            sp = build_spline(self.frozen(), 1.0, 0.1, 0.1, kind=kind)
            for phi in np.linspace(1.0, 1.2, 41):
                s = sp.invert_local(phi)
                assert -0.1 <= s <= 0.1
                assert sp.value_local(s) == pytest.approx(phi, abs=1e-12)

    def test_invert_round_trips_in_parameter_away_from_flat(self):
        sp = build_spline(self.frozen(), 1.0, 0.1, 0.1, kind="cubic")
        for s0 in np.concatenate([np.linspace(-0.095, -0.02, 7),
                                  np.linspace(0.02, 0.095, 7)]):
            assert abs(sp.invert_local(sp.value_local(s0)) - s0) < 1e-9
        assert sp.invert(sp.value(1.03)) == pytest.approx(1.03, abs=1e-9)

    def test_invert_rejects_out_of_range(self):
        sp = build_spline(self.frozen(), 1.0, 0.1, 0.1, kind="cubic")
        with pytest.raises(NumericalError, match="outside the spline range"):
            sp.invert_local(1.5)

    def test_bad_kind_and_extent(self):
        fr = self.frozen()
        with pytest.raises(ValueError):
            build_spline(fr, 1.0, 0.1, 0.1, kind="quintic")
        with pytest.raises(ValueError):
            build_spline(fr, 1.0, -0.1, 0.1)

    def test_degenerate_interval(self):
        # inside the fold the raw values drop across the window
        with pytest.raises(SplineMonotonicityError, match="degenerate"):
            build_spline(WavyLine(0.6), DIP, 0.1, 0.1)

    def test_negative_endpoint_slope(self):
        with pytest.raises(SplineMonotonicityError, match="slope negative"):
            build_spline(WavyLine(0.6), DIP, 1.2, 0.2)

    def test_slope_budget_blocks_cubic_but_not_linear(self):
        # values 0 and 0.1 with slopes 10 at both ends of [-0.1, 0.1]:
        # the flat value would need va + sa*eps/3 <= vb - sb*eps/3,
        # i.e. 1/3 <= -0.23, impossible for the cubic kind
        steep = PolyStub([0.05, -4.25, 0.0, 475.0])
        with pytest.raises(SplineMonotonicityError, match="monotone budget"):
            build_spline(steep, 2.0, 0.1, 0.1, kind="cubic")
        sp = build_spline(steep, 2.0, 0.1, 0.1, kind="linear")
        assert sp.slope_local(-0.05) == pytest.approx(0.5)
        assert sp.slope_local(0.05) == pytest.approx(0.5)

    def test_explicit_flat_value(self):
        # values 0 and 1 with slopes 6 and 0.2; star must stay at least
        # sa*eps/3 = 0.2 above va for the left piece to stay monotone
        lop = PolyStub([0.645, 5.95, -14.5, -95.0])
        sp = build_spline(lop, 2.0, 0.1, 0.1, kind="cubic", theta_star=0.5)
        assert sp.theta_star == 0.5
        s = np.linspace(-0.1, 0.1, 1001)
        assert np.all(np.diff(sp.value_local(s)) > 0.0)
        with pytest.raises(SplineMonotonicityError, match="three times the secant"):
            build_spline(lop, 2.0, 0.1, 0.1, kind="cubic", theta_star=0.1)
        with pytest.raises(SplineMonotonicityError, match="outside the endpoint"):
            build_spline(lop, 2.0, 0.1, 0.1, kind="cubic", theta_star=2.0)


class TestCorrectCorner:
    def test_no_fold_passes_through(self):
        spline, report = correct_corner(WavyLine(0.2), DIP)
        assert spline is None
        assert report == {"t0": DIP, "fold": False, "kind": "cubic", "retries": 0}

    def test_cubic_widens_until_feasible(self):
        duck = WavyLine(0.6)
        spline, report = correct_corner(duck, DIP, kind="cubic")
        assert report["fold"] is True
        assert report["retries"] >= 1
        assert spline.kind == "cubic"
        assert spline.slope_local(0.0) == 0.0
        # window ends sit where the raw slope is clean
        assert duck.theta_prime(DIP - spline.eps1) >= 0.0
        assert duck.theta_prime(DIP + spline.eps2) >= 0.0
        # and the dip itself is strictly inside
        assert duck.theta_prime(DIP) < 0.0
        s = np.linspace(-spline.eps1, spline.eps2, 2001)
        assert np.all(np.diff(spline.value_local(s)) > 0.0)

    def test_linear_settles_immediately(self):
        spline, report = correct_corner(WavyLine(0.6), DIP, kind="linear")
        assert report["retries"] == 0
        assert spline.kind == "linear"
        assert report["eps1"] == spline.eps1
        assert report["theta_star"] == spline.theta_star

    def test_gives_up_after_max_retries(self):
        with pytest.raises(NumericalError, match="no monotone spline"):
            correct_corner(WavyLine(0.6), DIP, kind="cubic", max_retries=1)


class TestCorrectedCorrespondence:
    def test_two_corners_restore_monotonicity(self):
        duck = WavyLine(0.6)
        assert monotonicity_report(duck)["monotone"] is False
        corrected, reports = apply_corrections(duck, [DIP, DIP + np.pi])
        assert [r["fold"] for r in reports] == [True, True]
        mono = monotonicity_report(corrected)
        assert mono["monotone"] is True
        assert mono["span"] == pytest.approx(TWO_PI, abs=1e-9)

    def test_kind_override_per_corner(self):
        duck = WavyLine(0.6)
        corrected, reports = apply_corrections(
            duck, [(DIP, "linear"), DIP + np.pi], kind="cubic"
        )
        assert [r["kind"] for r in reports] == ["linear", "cubic"]
        kinds = sorted(s.kind for s in corrected.splines)
        assert kinds == ["cubic", "linear"]

    def test_no_fold_returns_input_object(self):
        duck = WavyLine(0.2)
        corrected, reports = apply_corrections(duck, [DIP])
        assert corrected is duck
        assert reports[0]["fold"] is False

    def test_window_values_and_slopes_come_from_spline(self):
        duck = WavyLine(0.6)
        corrected, _ = apply_corrections(duck, [DIP, DIP + np.pi])
        sp = min(corrected.splines, key=lambda s: abs(s.t0 - DIP))
        inside = DIP + 0.3 * sp.eps2
        assert corrected.theta(inside) == pytest.approx(
            sp.value_local(0.3 * sp.eps2), abs=1e-12
        )
        assert corrected.theta_prime(inside) == pytest.approx(
            sp.slope_local(0.3 * sp.eps2), abs=1e-12
        )
        outside = DIP + np.pi / 2
        assert corrected.theta(outside) == duck.theta(outside)

    def test_junctions_are_continuous(self):
        duck = WavyLine(0.6)
        corrected, _ = apply_corrections(duck, [DIP, DIP + np.pi])
        d = 1e-9
        for sp in corrected.splines:
            for edge in (sp.t0 - sp.eps1, sp.t0 + sp.eps2):
                jump = abs(corrected.theta(edge + d) - corrected.theta(edge - d))
                assert jump < 1e-7

    def test_window_wrapping_period_start(self):
        wrap = WavyLine(0.6, c=0.05 - np.pi / 2)
        corrected, _ = apply_corrections(wrap, [0.05, 0.05 + np.pi])
        assert monotonicity_report(corrected)["monotone"] is True
        sp = min(corrected.splines, key=lambda s: s.t0)
        assert sp.t0 == pytest.approx(0.05, abs=1e-12)
        # evaluation just below 2 pi falls into the wrapped window
        t_neg = TWO_PI + 0.05 - 0.5 * sp.eps1
        assert corrected.theta(t_neg - TWO_PI) == pytest.approx(
            sp.value_local(-0.5 * sp.eps1), abs=1e-12
        )

    def test_overlapping_windows_rejected(self):
        line = Line()
        a = build_spline(line, 0.0, 0.4, 0.4, kind="linear")
        b = build_spline(line, 0.5, 0.4, 0.4, kind="linear")
        with pytest.raises(NumericalError, match="overlap"):
            CorrectedCorrespondence(line, [a, b])

    def test_window_covering_period_rejected(self):
        line = Line()
        huge = build_spline(line, 0.0, 3.2, 3.2, kind="linear")
        with pytest.raises(NumericalError, match="whole period"):
            CorrectedCorrespondence(line, [huge])


class TestMonotonicityReport:
    def test_flags_raw_fold(self):
        rep = monotonicity_report(WavyLine(0.6))
        assert rep["monotone"] is False
        assert rep["min_step"] < 0.0
        assert rep["span"] == pytest.approx(TWO_PI, abs=1e-9)

    def test_clean_line(self):
        rep = monotonicity_report(Line())
        assert rep["monotone"] is True
        assert rep["min_step"] > 0.0
