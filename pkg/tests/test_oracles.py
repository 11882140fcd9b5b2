"""Closed-form oracles and the independent fixed-step determinant."""

import math

import numpy as np
import pytest

from specdet import (
    OracleResult,
    brute_force_det,
    char_det,
    const_coeff_fundamental,
    dirichlet_reference,
)
from conftest import DELTA_SYMMETRIC_D_HALF, degenerate


class TestConstCoeffFundamental:
    def test_lambda_zero_polynomials(self):
        """u0 = 1, u1 = x - 1/2 exactly."""
        pair = const_coeff_fundamental(2, 0.0)
        np.testing.assert_allclose(pair.U0, [[1.0, -0.5], [0.0, 1.0]], atol=1e-16)
        np.testing.assert_allclose(pair.U1, [[1.0, 0.5], [0.0, 1.0]], atol=1e-16)

    def test_trig_values(self):
        pair = const_coeff_fundamental(2, -math.pi**2)
        np.testing.assert_allclose(
            pair.U0, [[0.0, -1 / math.pi], [math.pi, 0.0]], atol=1e-13
        )
        np.testing.assert_allclose(
            pair.U1, [[0.0, 1 / math.pi], [-math.pi, 0.0]], atol=1e-13
        )

    def test_quartic_lambda_zero(self):
        pair = const_coeff_fundamental(4, 0.0)
        for order in range(4):
            for k in range(4):
                expect = (
                    (-0.5) ** (k - order) / math.factorial(k - order)
                    if k >= order
                    else 0.0
                )
                assert abs(pair.U0[order, k] - expect) < 1e-16

    def test_midpoint_identity_is_exact(self):
        """Both evaluation branches satisfy the normalization at t = 0."""
        for lam in (0.3, 400.0 - 7.0j):
            from specdet.oracles import _exponential_matrix, _series_matrix

            build = _series_matrix if abs(lam) <= 1 else _exponential_matrix
            np.testing.assert_allclose(build(2, complex(lam), 0.0), np.eye(2), atol=1e-12)

    def test_odd_order_rejected(self):
        with pytest.raises(ValueError):
            const_coeff_fundamental(3, 0.0)


class TestDirichletReference:
    @pytest.mark.parametrize(
        "k,value",
        [(1, -9.8696044), (2, -39.4784176), (3, -88.8264396)],
    )
    def test_reference_values(self, k, value):
        np.testing.assert_allclose(dirichlet_reference(k), value, atol=5e-7)

    def test_positive_index_required(self):
        with pytest.raises(ValueError):
            dirichlet_reference(0)

    @pytest.mark.parametrize("k", [1, 2, 3, 4, 5])
    def test_values_are_zeros_of_dirichlet_determinant(self, dirichlet2, k):
        assert abs(char_det(dirichlet2, dirichlet_reference(k)).delta) <= 1e-8


class TestBruteForceDet:
    def test_constant_coefficient_d2(self, zeros2):
        """Trig closed form: Delta = 3, reproduced to 1e-9 at high resolution."""
        prob = degenerate(zeros2, 2.0)
        assert abs(brute_force_det(prob, 0.0, steps=100_000) - 3.0) <= 1e-9

    def test_symmetric_problem_value(self, symmetric2):
        prob = degenerate(symmetric2, 0.5)
        value = brute_force_det(prob, 0.0, steps=100_000)
        assert abs(value - DELTA_SYMMETRIC_D_HALF) <= 1e-6

    def test_unit_coupling_vanishes(self, symmetric2):
        prob = degenerate(symmetric2, 1.0)
        assert abs(brute_force_det(prob, 17.0, steps=100_000)) <= 1e-8

    def test_step_floor_enforced(self, zeros2):
        with pytest.raises(ValueError):
            brute_force_det(degenerate(zeros2, 0.5), 0.0, steps=100)

    @pytest.mark.parametrize("lam", [0.0, -50.0, 3 + 4j])
    def test_agrees_with_adaptive_path(self, symmetric2, lam):
        """Two independent code paths within 1e-6 relative."""
        prob = degenerate(symmetric2, 0.5)
        fast = char_det(prob, lam).delta
        slow = brute_force_det(prob, lam, steps=20_000)
        assert abs(fast - slow) <= 1e-6 * max(1.0, abs(slow))

    def test_general_form_supported(self, dirichlet2):
        slow = brute_force_det(dirichlet2, -25.0, steps=10_000)
        rho = math.sqrt(25.0)
        expect = math.sin(rho) / rho
        assert abs(slow - expect) <= 1e-9


class TestOracleResult:
    def test_holds_labeled_values(self):
        r = OracleResult("reference endpoint matrix", np.eye(2))
        assert r.description
        np.testing.assert_array_equal(np.asarray(r.value), np.eye(2))

    def test_rejects_nonfinite(self):
        with pytest.raises(ValueError):
            OracleResult("bad", float("nan"))
