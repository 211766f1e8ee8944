from __future__ import annotations

import tempfile
from pathlib import Path
from unittest import TestCase

import numpy as np

from heritage.revive.degrade import (
    EmpiricalCurve,
    LinearCurveBounds,
    LinearCurveParams,
    apply_empirical_curve,
    apply_linear_degradation,
    fit_empirical_curve,
)
from heritage.revive.exceptions import DimensionError, DomainTagError, EmptyInputError, RangeError
from heritage.revive.imagecore import DomainTag, LuminancePlane


def nd_plane(values: np.ndarray | float, shape: tuple[int, int] = (4, 4)) -> LuminancePlane:
    return LuminancePlane(np.broadcast_to(np.asarray(values, dtype=float), shape), DomainTag.NON_DEGRADED)


def full_ramp() -> LuminancePlane:
    return nd_plane(np.linspace(0.0, 255.0, 256 * 16).reshape(64, 64), (64, 64))


class TestLinearCurve(TestCase):
    def test_arithmetic(self):
        assert np.allclose(apply_linear_degradation(nd_plane(200.0), LinearCurveParams(0.3, 20.0)).values, 80.0)
        assert np.allclose(apply_linear_degradation(nd_plane(255.0), LinearCurveParams(0.2, 25.0)).values, 76.0)
        out = apply_linear_degradation(nd_plane(100.0), LinearCurveParams(0.5, 15.0))
        assert np.allclose(out.values, 65.0)
        assert out.domain_tag is DomainTag.SYNTHETIC_DEGRADED

    def test_params_out_of_range(self):
        with self.assertRaises(RangeError):
            LinearCurveParams(0.6, 20.0)
        with self.assertRaises(RangeError):
            LinearCurveParams(0.3, 30.0)

    def test_custom_bounds(self):
        bounds = LinearCurveBounds(alpha=(0.6, 0.8), beta=(0.0, 5.0))
        params = LinearCurveParams(0.7, 1.0, bounds=bounds)
        assert params.alpha == 0.7
        with self.assertRaises(RangeError):
            LinearCurveBounds(alpha=(0.5, 1.5))

    def test_requires_non_degraded_input(self):
        plane = LuminancePlane(np.zeros((2, 2)), DomainTag.REAL_DEGRADED)
        with self.assertRaises(DomainTagError):
            apply_linear_degradation(plane, LinearCurveParams(0.3, 20.0))

    def test_monotone(self):
        rng = np.random.default_rng(5)
        ramp = full_ramp()
        for _ in range(10):
            out = apply_linear_degradation(ramp, LinearCurveBounds().sample(rng)).values.ravel()
            assert np.all(np.diff(out) >= 0)


class TestFitEmpiricalCurve(TestCase):
    def test_constant_offset(self):
        rng = np.random.default_rng(0)
        restored = LuminancePlane(rng.uniform(40, 255, size=(16, 16)), DomainTag.RESTORED)
        degraded = LuminancePlane(restored.values - 30.0, DomainTag.REAL_DEGRADED)
        curve = fit_empirical_curve([(degraded, restored)])
        populated = curve.counts > 0
        assert np.allclose(curve.mean_delta[populated], -30.0)

    def test_identity_pairs(self):
        restored = full_ramp()
        curve = fit_empirical_curve([(restored, restored)])
        assert np.allclose(curve.mean_delta, 0.0)
        assert curve.bins == 32
        assert curve.empty_bins == ()

    def test_recovers_linear_ramp(self):
        ramp = full_ramp()
        degraded = apply_linear_degradation(ramp, LinearCurveParams(0.35, 20.0))
        curve = fit_empirical_curve([(degraded, ramp)], bins=32)
        expected = -0.65 * curve.centers + 20.0
        assert np.all(np.abs(curve.mean_delta - expected) < 1.0)

    def test_empty_bins_are_interpolated(self):
        restored = LuminancePlane(np.array([[10.0, 10.0, 240.0, 240.0]]), DomainTag.RESTORED)
        degraded = LuminancePlane(np.array([[0.0, 0.0, 200.0, 200.0]]), DomainTag.REAL_DEGRADED)
        curve = fit_empirical_curve([(degraded, restored)], bins=4)
        assert curve.empty_bins == (1, 2)
        assert np.allclose(curve.mean_delta[[0, 3]], [-10.0, -40.0])
        # knots at 31.875 and 223.125, linear in between
        slope = -30.0 / (223.125 - 31.875)
        assert np.allclose(curve.mean_delta[1], -10.0 + slope * (95.625 - 31.875))
        assert np.all(np.isfinite(curve.mean_delta))

    def test_single_bin_is_global_mean(self):
        restored = full_ramp()
        degraded = LuminancePlane(restored.values * 0.5, DomainTag.REAL_DEGRADED)
        curve = fit_empirical_curve([(degraded, restored)], bins=1)
        assert np.isclose(curve.mean_delta[0], np.mean(degraded.values - restored.values))

    def test_errors(self):
        with self.assertRaises(EmptyInputError):
            fit_empirical_curve([])
        a = nd_plane(1.0, (2, 2))
        b = nd_plane(1.0, (2, 3))
        with self.assertRaises(DimensionError):
            fit_empirical_curve([(a, b)])
        with self.assertRaises(RangeError):
            fit_empirical_curve([(a, a)], bins=0)


class TestApplyEmpiricalCurve(TestCase):
    def test_constant_curve_clamps(self):
        curve = EmpiricalCurve(np.linspace(0, 255, 5), np.full(4, -30.0), np.ones(4))
        out = apply_empirical_curve(nd_plane(np.array([[10.0, 100.0]]), (1, 2)), curve)
        assert np.allclose(out.values, [[0.0, 70.0]])
        assert out.domain_tag is DomainTag.SYNTHETIC_DEGRADED

    def test_zero_curve_is_identity(self):
        ramp = full_ramp()
        curve = fit_empirical_curve([(ramp, ramp)])
        assert np.allclose(apply_empirical_curve(ramp, curve).values, ramp.values)

    def test_interpolates_between_knots(self):
        curve = EmpiricalCurve(np.array([0.0, 128.0, 256.0]), np.array([-10.0, -50.0]), np.array([1, 1]))
        assert np.allclose(curve.centers, [64.0, 192.0])
        out = apply_empirical_curve(nd_plane(128.0, (1, 1)), curve)
        assert np.allclose(out.values, 98.0)

    def test_flat_extrapolation(self):
        curve = EmpiricalCurve(np.array([0.0, 128.0, 256.0]), np.array([-10.0, -50.0]), np.array([1, 1]))
        out = apply_empirical_curve(nd_plane(np.array([[20.0, 250.0]]), (1, 2)), curve)
        assert np.allclose(out.values, [[10.0, 200.0]])

    def test_curve_invariants(self):
        with self.assertRaises(RangeError):
            EmpiricalCurve(np.array([0.0, 200.0, 100.0, 255.0]), np.zeros(3), np.ones(3))
        with self.assertRaises(RangeError):
            EmpiricalCurve(np.array([10.0, 255.0]), np.zeros(1), np.ones(1))
        with self.assertRaises(DimensionError):
            EmpiricalCurve(np.array([0.0, 255.0]), np.zeros(2), np.ones(2))
        with self.assertRaises(RangeError):
            EmpiricalCurve(np.array([0.0, 255.0]), np.array([np.nan]), np.ones(1))

    def test_json_file(self):
        ramp = full_ramp()
        curve = fit_empirical_curve([(apply_linear_degradation(ramp, LinearCurveParams(0.4, 18.0)), ramp)], bins=8)
        with tempfile.TemporaryDirectory() as tmp:
            loaded = EmpiricalCurve.load(curve.save(Path(tmp) / "curve.json"))
        assert np.array_equal(loaded.bin_edges, curve.bin_edges)
        assert np.allclose(loaded.mean_delta, curve.mean_delta)
        assert np.array_equal(loaded.counts, curve.counts)
        assert sorted(curve.to_json()) == ["bin_edges", "counts", "mean_delta"]
