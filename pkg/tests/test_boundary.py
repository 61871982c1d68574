import json

import numpy as np
import pytest

from acutemap import (
    AnglePoint,
    BoundaryError,
    ConfigError,
    TrigBoundary,
    boundary_from_dict,
    boundary_to_dict,
    detect_corners,
    polyline_distance,
    polyline_winding,
    validate,
    winding_number,
)
from conftest import semidisk_samples

TWO_PI = 2.0 * np.pi


class TestTrigBoundary:
    def test_hand_values(self, lobed):
        # z(t) = e^it + 0.25 e^-2it + 0.125i e^-3it evaluated by hand
        assert lobed(0.0) == pytest.approx(1.25 + 0.125j, abs=1e-15)
        assert lobed(np.pi) == pytest.approx(-0.75 - 0.125j, abs=1e-12)
        assert lobed.derivative(0.0) == pytest.approx(0.375 + 0.5j, abs=1e-15)
        assert lobed.derivative(0.0, 2) == pytest.approx(-2.0 - 1.125j, abs=1e-12)

    def test_extents(self, lobed, circle):
        assert (lobed.m, lobed.n) == (3, 1)
        assert (circle.m, circle.n) == (0, 1)

    def test_derivative_matches_finite_differences(self, lobed):
        t = np.array([0.3, 1.7, 4.0, 6.1])
        h = 1e-5
        fd1 = (lobed(t + h) - lobed(t - h)) / (2.0 * h)
        fd2 = (lobed(t + h) - 2.0 * lobed(t) + lobed(t - h)) / h**2
        assert np.max(np.abs(fd1 - lobed.derivative(t))) < 1e-7
        assert np.max(np.abs(fd2 - lobed.derivative(t, 2))) < 1e-4

    def test_derivative_order_guard(self, circle):
        with pytest.raises(ValueError):
            circle.derivative(0.0, 3)

    def test_zero_coefficients_dropped(self):
        b = TrigBoundary({1: 1.0, 5: 0.0, -2: 0.0})
        assert b.coeffs == {1: (1.0 + 0.0j)}

    def test_needs_positive_frequency(self):
        with pytest.raises(ValueError):
            TrigBoundary({0: 1.0, -1: 0.5})

    def test_fit_recovers_circle(self):
        t = TWO_PI * np.arange(64) / 64
        b = TrigBoundary.fit(np.exp(1j * t), 0, 2)
        assert abs(b.coeffs[1] - 1.0) < 1e-14
        assert b.fit_residual < 1e-14

    def test_fit_round_trips_coefficients(self, lobed):
        t = TWO_PI * np.arange(256) / 256
        fitted = TrigBoundary.fit(lobed(t), 3, 1)
        for k, d in lobed.coeffs.items():
            assert abs(fitted.coeffs[k] - d) < 1e-12

    def test_fit_nyquist_guard(self):
        t = TWO_PI * np.arange(32) / 32
        with pytest.raises(ConfigError, match="Nyquist bound 65"):
            TrigBoundary.fit(np.exp(1j * t), 16, 16)


class TestAnglePoint:
    def test_wraps_parameter(self):
        c = AnglePoint(TWO_PI + 1.0, 0.5)
        assert c.t0 == pytest.approx(1.0)

    def test_rejects_bad_fraction(self):
        for lam in (0.0, 1.0, -0.3, 2.0):
            with pytest.raises(ValueError):
                AnglePoint(0.0, lam)

    def test_immutable(self):
        c = AnglePoint(1.0, 0.5)
        with pytest.raises(AttributeError):
            c.lam = 0.7


class TestDetectCorners:
    def test_circle_has_none(self, circle):
        assert detect_corners(circle) == []

    def test_semidisk_has_two_right_angles(self, semidisk_boundary):
        found = detect_corners(semidisk_boundary)
        assert len(found) == 2
        # junctions of arc and diameter, interior angle pi/2
        s1 = 2.0 * np.pi**2 / (np.pi + 2.0)
        assert found[0].t0 == pytest.approx(0.5 * s1, abs=0.02)
        assert found[1].t0 == pytest.approx(TWO_PI - 0.5 * s1, abs=0.02)
        for c in found:
            assert 0.4 < c.lam < 0.6


class TestWinding:
    def test_simple_curves(self, circle, lobed):
        assert winding_number(circle) == 1
        assert winding_number(lobed) == 1

    def test_polyline_orientation(self):
        t = TWO_PI * np.arange(128) / 128
        ring = np.exp(1j * t)
        assert polyline_winding(ring) == 1
        assert polyline_winding(ring[::-1]) == -1
        assert polyline_winding(ring, about=3.0) == 0

    def test_point_on_curve_rejected(self):
        t = TWO_PI * np.arange(128) / 128
        with pytest.raises(BoundaryError):
            polyline_winding(np.exp(1j * t), about=1.0)


class TestPolylineDistance:
    def test_unit_square(self):
        square = np.array([0.0, 1.0, 1.0 + 1.0j, 1.0j])
        queries = np.array([0.5 + 0.5j, 2.0 + 0.5j, 0.5 + 0.25j])
        got = polyline_distance(square, queries)
        assert got == pytest.approx([0.5, 1.0, 0.25], abs=1e-14)

    def test_scalar_query(self):
        square = np.array([0.0, 1.0, 1.0 + 1.0j, 1.0j])
        assert polyline_distance(square, 0.5 + 0.5j) == pytest.approx(0.5)


class TestValidate:
    def test_accepts_fixtures(self, circle, lobed, semidisk_boundary):
        validate(circle)
        validate(lobed)
        validate(semidisk_boundary)

    def test_rejects_clockwise_curve(self):
        # e^it + 1.5 e^-it traces an ellipse clockwise
        with pytest.raises(BoundaryError, match="winding"):
            validate(TrigBoundary({1: 1.0, -1: 1.5}))

    def test_rejects_degenerate_curve(self):
        # e^it + e^-it = 2 cos t collapses onto a segment
        with pytest.raises(BoundaryError):
            validate(TrigBoundary({1: 1.0, -1: 1.0}))


class TestSerialization:
    def test_round_trip(self, lobed):
        corners = [AnglePoint(1.0, 0.5), AnglePoint(4.0, 0.25)]
        data = json.loads(json.dumps(boundary_to_dict(lobed, corners)))
        back, back_corners = boundary_from_dict(data)
        assert back.coeffs == lobed.coeffs
        assert back_corners == corners

    def test_sample_form(self):
        z = semidisk_samples()
        data = {
            "samples": [[p.real, p.imag] for p in z],
            "m": 16,
            "n": 16,
        }
        b, corners = boundary_from_dict(data)
        assert corners == []
        assert b.fit_residual < 0.01

    def test_malformed_specs(self):
        with pytest.raises(ConfigError):
            boundary_from_dict([1, 2, 3])
        with pytest.raises(ConfigError):
            boundary_from_dict({"coeffs": [{"k": 1}]})
        with pytest.raises(ConfigError):
            boundary_from_dict({"samples": [[0.0, 0.0]]})
        with pytest.raises(ConfigError):
            boundary_from_dict({"samples": [0.0, 1.0], "m": 1, "n": 1})
        with pytest.raises(ConfigError):
            boundary_from_dict(
                {"coeffs": [{"k": 1, "re": 1.0, "im": 0.0}], "corners": [{"t0": 0}]}
            )
