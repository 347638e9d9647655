import math

import mpmath as mp
import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy.integrate import quad

from cssgen.errors import NotNormalized, TailTooHeavy
from cssgen.states import (
    FockVector,
    coherent_matrix,
    coherent_overlap,
    coherent_to_fock,
    fidelity,
    gram_matrix,
    hermite_psi,
    hermite_psi_table,
    misfit,
    quadrature_overlap,
    sqrt_factorial,
)

PI_QUARTER = math.pi ** -0.25


def mp_hermite_psi(n, x):
    mp.mp.dps = 40
    x = mp.mpf(x)
    v = mp.hermite(n, x) * mp.exp(-x * x / 2) / mp.sqrt(mp.mpf(2) ** n * mp.factorial(n) * mp.sqrt(mp.pi))
    return float(v)


class TestHermitePsi:
    def test_ground_state_at_origin(self):
        assert hermite_psi(0, 0.0) == pytest.approx(PI_QUARTER, abs=1e-15)

    def test_odd_parity_vanishes_at_origin(self):
        assert hermite_psi(1, 0.0) == 0.0

    def test_against_high_precision_reference(self):
        # frozen from a 50-digit mpmath evaluation
        assert hermite_psi(12, 1.7) == pytest.approx(-0.17092331357521844, abs=1e-10)

    @pytest.mark.parametrize("n", [0, 1, 2, 5, 17, 40])
    @pytest.mark.parametrize("x", [-3.3, 0.4, 2.0])
    def test_recurrence_matches_mpmath(self, n, x):
        assert hermite_psi(n, x) == pytest.approx(mp_hermite_psi(n, x), abs=1e-12)

    def test_negative_order_rejected(self):
        with pytest.raises(ValueError):
            hermite_psi(-1, 0.0)

    def test_table_matches_scalar(self, rng):
        xs = rng.uniform(-4, 4, 5)
        table = hermite_psi_table(20, xs)
        for j, x in enumerate(xs):
            for n in (0, 3, 20):
                assert table[j, n] == pytest.approx(hermite_psi(n, x), rel=1e-13)


class TestQuadratureOverlap:
    def test_vacuum_at_origin(self):
        assert quadrature_overlap(0.0, 0.0, 0.0) == pytest.approx(PI_QUARTER)
        assert quadrature_overlap(0.0, 0.0, 0.0) == pytest.approx(0.751126, abs=1e-6)

    @pytest.mark.parametrize("alpha", [0.3, 1.7])
    def test_displaced_gaussian_modulus(self, alpha):
        for x in (-1.0, 0.5, 2.2):
            got = abs(quadrature_overlap(x, 0.0, alpha)) ** 2
            want = math.pi ** -0.5 * math.exp(-((x - math.sqrt(2) * alpha) ** 2))
            assert got == pytest.approx(want, rel=1e-12)

    def test_rotated_complex_point(self):
        # frozen from the 50-digit Fock-sum evaluation
        got = quadrature_overlap(1.3, 0.7, 0.4 + 0.9j)
        assert got.real == pytest.approx(0.68800436665626927, abs=1e-10)
        assert got.imag == pytest.approx(0.29928952079560410, abs=1e-10)

    def test_fock_sum_consistency(self, rng):
        n_max = 64
        for _ in range(25):
            x = rng.uniform(-10, 10)
            theta = rng.uniform(0, 2 * math.pi)
            alpha = rng.uniform(0, 4) * np.exp(1j * rng.uniform(0, 2 * math.pi))
            psi = hermite_psi_table(n_max, x)
            ns = np.arange(n_max + 1)
            coh = np.exp(-0.5 * abs(alpha) ** 2) * alpha**ns / np.array(
                [sqrt_factorial(int(n)) for n in ns]
            )
            fock_sum = np.sum(psi * np.exp(-1j * ns * theta) * coh)
            assert quadrature_overlap(x, theta, alpha) == pytest.approx(fock_sum, abs=1e-9)

    @pytest.mark.parametrize("theta", [0.0, 0.9, math.pi / 2])
    def test_position_density_normalized(self, theta, rng):
        alpha = rng.uniform(0, 4) * np.exp(1j * rng.uniform(0, 2 * math.pi))
        val, err = quad(lambda x: abs(quadrature_overlap(x, theta, alpha)) ** 2, -15, 15,
                        limit=200)
        assert val == pytest.approx(1.0, abs=1e-9)

    def test_huge_amplitude_stays_finite(self):
        # separate exponential factors would under/overflow far below this
        v = quadrature_overlap(1.5, 0.0, 22981.0 * 1j * np.exp(1j * 3.5e-5))
        assert np.isfinite(v.real) and np.isfinite(v.imag)


class TestCoherentOverlap:
    def test_self_overlap(self):
        assert coherent_overlap(1.3 - 0.2j, 1.3 - 0.2j) == pytest.approx(1.0)

    def test_vacuum_overlap(self):
        b = 0.7 + 0.4j
        assert coherent_overlap(0.0, b) == pytest.approx(math.exp(-0.5 * abs(b) ** 2))

    def test_fock_sum(self):
        a, b = 1.0, 2.0j
        n = np.arange(120)
        fa = coherent_matrix(np.array([a]), 119)[0]
        fb = coherent_matrix(np.array([b]), 119)[0]
        assert coherent_overlap(a, b) == pytest.approx(np.vdot(fa, fb), abs=1e-12)

    @settings(max_examples=40, deadline=None)
    @given(st.lists(st.complex_numbers(max_magnitude=3, allow_nan=False, allow_infinity=False),
                    min_size=1, max_size=6))
    def test_gram_matrix_positive_semidefinite(self, amps):
        g = gram_matrix(np.array(amps))
        eigs = np.linalg.eigvalsh(g)
        assert eigs.min() >= -1e-12


class TestCoherentToFock:
    def test_vacuum(self):
        v = coherent_to_fock(0.0, 16)
        assert v.coeffs[0] == 1.0
        assert np.all(v.coeffs[1:] == 0)

    def test_unit_amplitude_ground_coefficient(self):
        v = coherent_to_fock(1.0, 40)
        assert v.coeffs[0] == pytest.approx(math.exp(-0.5))

    def test_norm_of_truncated_expansion(self):
        v = coherent_to_fock(2.5 + 1j, 64)
        assert v.norm() == pytest.approx(1.0, abs=1e-10)

    def test_tail_rejection(self):
        with pytest.raises(TailTooHeavy):
            coherent_to_fock(6.0, 32)

    def test_matrix_matches_vector_path(self, rng):
        amps = rng.normal(size=4) + 1j * rng.normal(size=4)
        mat = coherent_matrix(amps, 30)
        for j, a in enumerate(amps):
            v = FockVector(mat[j])
            w = coherent_to_fock(a, 30)
            assert np.allclose(v.coeffs, w.coeffs, atol=1e-14)


class TestMisfit:
    def test_self_misfit_zero(self, rng):
        v = FockVector(rng.normal(size=12) + 1j * rng.normal(size=12)).normalized()
        assert misfit(v, v) == 0.0

    def test_orthogonal_states(self):
        zero = FockVector(np.eye(4)[0])
        one = FockVector(np.eye(4)[1])
        assert misfit(zero, one) == 1.0

    def test_vacuum_vs_coherent(self):
        zero = FockVector(np.eye(41)[0])
        coh = coherent_to_fock(1.0, 40)
        assert misfit(zero, coh) == pytest.approx(0.6321205588285577, abs=1e-12)

    def test_rejects_unnormalized(self):
        v = FockVector(np.array([2.0, 0.0]))
        u = FockVector(np.array([1.0, 0.0]))
        with pytest.raises(NotNormalized):
            misfit(v, u)

    @settings(max_examples=30, deadline=None)
    @given(st.integers(0, 1_000_000))
    def test_symmetric(self, seed):
        r = np.random.default_rng(seed)
        a = FockVector(r.normal(size=9) + 1j * r.normal(size=9)).normalized()
        b = FockVector(r.normal(size=9) + 1j * r.normal(size=9)).normalized()
        assert misfit(a, b) == misfit(b, a)
        assert 0.0 <= misfit(a, b) <= 1.0


class TestFockVector:
    def test_normalize(self, rng):
        v = FockVector(rng.normal(size=8)).normalized()
        assert abs(np.sum(np.abs(v.coeffs) ** 2) - 1.0) < 1e-12

    def test_padding_in_inner(self):
        a = FockVector(np.array([1.0]))
        b = FockVector(np.array([1.0, 0.0, 0.0]))
        assert a.inner(b) == pytest.approx(1.0)
        assert fidelity(a, b) == pytest.approx(1.0)

    def test_tail_predicate(self):
        heavy = FockVector(np.ones(10))
        assert not heavy.has_converged_tail()
        light = FockVector(np.concatenate([np.ones(5), np.zeros(10)]))
        assert light.has_converged_tail()


def test_sqrt_factorial_log_domain_crossover():
    # the running product and the lgamma branch must agree near the switch
    lo = sqrt_factorial(150)
    hi = math.exp(0.5 * math.lgamma(152))
    assert sqrt_factorial(151) == pytest.approx(lo * math.sqrt(151), rel=1e-12)
    assert sqrt_factorial(151) == pytest.approx(hi / math.sqrt(152), rel=1e-10)
