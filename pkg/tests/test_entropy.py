import math

import numpy as np
import pytest
from hypothesis import given, settings
from numpy.testing import assert_allclose

from deficit_atlas import entropy
from deficit_atlas.entropy import Spectrum4
from deficit_atlas.errors import ConvergenceError, DomainError, SingularInput
from deficit_atlas.state import XxzState

from conftest import tetra_points, xxz_states

LN2 = math.log(2)


def h(x):
    return -sum(p * math.log(p) for p in (x, 1 - x) if p > 0)


def closed_zero(s1, c1, c3):
    xl = lambda v: v * math.log(v) if v > 0 else 0.0
    return 2 * LN2 - 0.5 * xl(1 - c3) - 0.25 * (xl(1 + 2 * s1 + c3) + xl(1 - 2 * s1 + c3))


def closed_pi_half(s1, c1, c3):
    r = math.hypot(s1, c1)
    xl = lambda v: v * math.log(v) if v > 0 else 0.0
    return 2 * LN2 - 0.5 * (xl(1 + r) + xl(1 - r))


class TestBasicEntropies:

    @pytest.mark.parametrize("x, expected", [
        (0.5, LN2), (0.0, 0.0), (1.0, 0.0), (0.25, 0.5623351446188083),
    ])
    def test_binary(self, x, expected):
        assert_allclose(entropy.binary_entropy(x), expected, rtol=1e-14, atol=1e-300)

    def test_binary_domain(self):
        with pytest.raises(DomainError):
            entropy.binary_entropy(1.1)

    @pytest.mark.parametrize("p, expected", [
        ((0.25,) * 4, 2 * LN2),
        ((1, 0, 0, 0), 0.0),
        ((0.375, 0.175, 0.375, 0.075), 1.2349116055524907),
    ])
    def test_quaternary(self, p, expected):
        assert_allclose(entropy.quaternary_entropy(Spectrum4(*p)), expected, rtol=1e-14)

    def test_quaternary_independent_sum(self):
        p = np.array([0.375, 0.175, 0.375, 0.075])
        assert_allclose(entropy.quaternary_entropy(Spectrum4(*p)), -np.sum(p * np.log(p)), rtol=1e-15)

    def test_spectrum_rejects(self):
        with pytest.raises(DomainError):
            Spectrum4(0.5, 0.5, 0.1, -0.1)
        with pytest.raises(DomainError):
            Spectrum4(0.5, 0.5, 0.1, 0.1)


class TestPreMeasurement:

    @pytest.mark.parametrize("x, expected", [
        ((0, 0, 0), (0.25,) * 4),
        ((0.2, 0.3, 0.1), (0.375, 0.175, 0.375, 0.075)),
        ((0, 1, -1), (0, 0, 1, 0)),
    ])
    def test_spectrum(self, x, expected):
        assert_allclose(tuple(entropy.pre_spectrum(XxzState(*x))), expected, atol=1e-15)

    @pytest.mark.parametrize("x, expected", [
        ((0, 0, 0), 2 * LN2), ((0, 1, -1), 0.0), ((0.2, 0.3, 0.1), 1.2349116055524907),
    ])
    def test_entropy(self, x, expected):
        assert_allclose(entropy.pre_entropy(XxzState(*x)), expected, rtol=1e-13, atol=1e-15)

    def test_matches_numpy_eigenvalues(self, rng):
        for s1, c1, c3 in zip(*tetra_points(50, rng)):
            x = XxzState(s1, c1, c3)
            rho = entropy.oracle_post_matrix(x, 0.0, 0.0)
            # at theta=0 the averaged matrix keeps only the diagonal of rho
            lam = np.sort(np.linalg.eigvalsh(rho))
            z = np.sort(tuple(entropy.post_spectrum(x, 0.0)))
            assert_allclose(lam, z, atol=1e-14)


class TestPostMeasurement:

    def test_endpoint_collapse(self, sample_state):
        s1, c1, c3 = sample_state.as_tuple()
        z = sorted(entropy.post_spectrum(sample_state, 0.0))
        expected = sorted([(1 + s1 + abs(s1 + c3)) / 4, (1 + s1 - abs(s1 + c3)) / 4,
                           (1 - s1 + abs(s1 - c3)) / 4, (1 - s1 - abs(s1 - c3)) / 4])
        assert_allclose(z, expected, atol=1e-15)
        r = math.hypot(s1, c1)
        half = sorted(entropy.post_spectrum(sample_state, math.pi / 2))
        assert_allclose(half, sorted([(1 - r) / 4] * 2 + [(1 + r) / 4] * 2), atol=1e-15)

    def test_oracle_at_pi_quarter(self, sample_state):
        m = entropy.oracle_post_matrix(sample_state, math.pi / 4, 0.0)
        lam = np.sort(np.linalg.eigvalsh(m))[::-1]
        assert_allclose(sorted(entropy.post_spectrum(sample_state, math.pi / 4), reverse=True),
                        lam, atol=1e-14)

    def test_maximally_mixed_invariant(self):
        x = XxzState(0, 0, 0)
        for t in np.linspace(0, math.pi / 2, 7):
            assert_allclose(entropy.post_entropy(x, t), 2 * LN2, rtol=1e-15)

    def test_endpoint_closed_forms(self, sample_state):
        assert_allclose(entropy.post_entropy(sample_state, 0.0),
                        closed_zero(*sample_state.as_tuple()), rtol=1e-13)
        assert_allclose(entropy.post_entropy(sample_state, math.pi / 2),
                        closed_pi_half(*sample_state.as_tuple()), rtol=1e-13)
        assert_allclose(entropy.post_entropy_at_pi_half(sample_state),
                        closed_pi_half(0.2, 0.3, 0.1), rtol=1e-14)

    def test_endpoint_agreement_random(self, rng):
        s1, c1, c3 = tetra_points(10**4, rng)
        z = entropy.post_entropy_values(s1, c1, c3, 0.0)
        p = entropy.post_entropy_values(s1, c1, c3, math.pi / 2)
        assert_allclose(z, [closed_zero(*t) for t in zip(s1, c1, c3)], atol=1e-12)
        assert_allclose(p, [closed_pi_half(*t) for t in zip(s1, c1, c3)], atol=1e-12)

    def test_normalization(self, rng):
        s1, c1, c3 = tetra_points(2000, rng)
        theta = rng.uniform(0, math.pi / 2, s1.shape)
        lam = np.stack(entropy.post_eigenvalues(s1, c1, c3, theta), axis=0)
        assert_allclose(lam.sum(axis=0), 1.0, atol=1e-14)
        assert lam.min() >= -1e-14

    def test_angle_domain(self, sample_state):
        with pytest.raises(DomainError):
            entropy.post_entropy(sample_state, 2.0)

    def test_cond_entropy(self, sample_state):
        assert_allclose(entropy.cond_entropy(XxzState(0, 0, 0), 0.4), LN2, rtol=1e-15)
        x = XxzState(0, 0.3, -0.2)
        assert_allclose(entropy.cond_entropy(x, 0.8), entropy.post_entropy(x, 0.8) - LN2, rtol=1e-14)
        m = entropy.oracle_post_matrix(sample_state, 0.3, 0.0)
        lam = np.linalg.eigvalsh(m)
        oracle = -np.sum(lam * np.log(lam)) - h((1 + 0.2 * math.cos(0.3)) / 2)
        assert_allclose(entropy.cond_entropy(sample_state, 0.3), oracle, rtol=1e-12)

    @settings(max_examples=100, deadline=None)
    @given(xxz_states())
    def test_reflection_symmetry(self, x):
        for t in (0.0, 0.4, 1.1, math.pi / 2):
            base = entropy.post_entropy(x, t)
            assert_allclose(entropy.post_entropy(x.reflected(-1, 1), t), base, atol=1e-13)
            assert_allclose(entropy.post_entropy(x.reflected(1, -1), t), base, atol=1e-13)


class TestSecondDerivatives:

    @staticmethod
    def fd_zero(x, eps=1e-4):
        f = lambda t: entropy.post_entropy(x, t)
        return 2 * (f(eps) - f(0.0)) / eps**2

    @staticmethod
    def fd_pi_half(x, eps=1e-4):
        f = lambda t: entropy.post_entropy(x, t)
        return 2 * (f(math.pi / 2 - eps) - f(math.pi / 2)) / eps**2

    def test_c3_zero_lines(self):
        for s1 in (0.1, 0.25, 0.4):
            assert abs(entropy.d2_post_at_zero(XxzState(s1, s1, 0.0))) < 1e-12
            assert abs(entropy.d2_post_at_zero(XxzState(s1, -s1, 0.0))) < 1e-12

    def test_zero_phase_stability(self):
        assert entropy.d2_post_at_zero(XxzState(0.3, 0.0, 0.1)) > 0

    def test_pi_half_positive_bell_like(self):
        assert entropy.d2_post_at_pi_half(XxzState(0.0, 0.4, -0.1)) > 0

    @pytest.mark.parametrize("fn, x", [
        ("d2_post_at_zero", (0.502469, 0.45, 0.1)),
        ("d2_post_at_pi_half", (0.416297, 0.45, 0.1)),
        ("d2_post_at_pi_half", (0.406975, 0.425, 0.15)),
    ])
    def test_roots(self, fn, x):
        # a root to six digits leaves a residual of order 1e-6 times the slope
        assert abs(getattr(entropy, fn)(XxzState(*x))) < 2e-5

    @pytest.mark.parametrize("x", [(0.2, 0.3, 0.1), (-0.1, 0.35, -0.4), (0.05, 0.1, 0.6)])
    def test_finite_differences(self, x):
        x = XxzState(*x)
        assert_allclose(entropy.d2_post_at_zero(x), self.fd_zero(x), rtol=1e-5)
        assert_allclose(entropy.d2_post_at_pi_half(x), self.fd_pi_half(x), rtol=1e-5)

    def test_removable_singularity(self):
        x = XxzState(0.3, 0.2, -0.3)
        near = XxzState(0.3 + 1e-7, 0.2, -0.3)
        assert_allclose(entropy.d2_post_at_zero(x), entropy.d2_post_at_zero(near), rtol=1e-5)

    def test_small_r_series(self):
        tiny = XxzState(1e-8, 1e-8, 0.2)
        assert_allclose(entropy.d2_post_at_pi_half(tiny),
                        entropy.d2_post_at_pi_half(XxzState(1e-5, 1e-5, 0.2)), rtol=1e-4)

    def test_singular_inputs(self):
        with pytest.raises(SingularInput):
            entropy.d2_post_at_zero(XxzState(0.0, 0.0, 1.0))
        with pytest.raises(SingularInput):
            entropy.d2_post_at_pi_half(XxzState(0.0, 1.0, -1.0))


class TestOracle:

    @pytest.mark.parametrize("diag", [(0.25,) * 4, (0.4, 0.3, 0.2, 0.1)])
    def test_diagonal(self, diag):
        assert_allclose(tuple(entropy.oracle_spectrum(np.diag(diag))), sorted(diag, reverse=True),
                        atol=1e-15)

    def test_trace_and_hermiticity(self, sample_state):
        for theta, phi in [(0.0, 0.0), (0.7, 1.3), (2.5, 5.0)]:
            m = entropy.oracle_post_matrix(sample_state, theta, phi)
            assert_allclose(np.trace(m).real, 1.0, atol=1e-14)
            assert_allclose(m, m.conj().T, atol=0)

    def test_phi_independence(self, sample_state):
        ref = sorted(entropy.post_spectrum(sample_state, 1.0), reverse=True)
        for phi in (0.0, 2.0, 4.5):
            got = tuple(entropy.oracle_spectrum(entropy.oracle_post_matrix(sample_state, 1.0, phi)))
            assert_allclose(got, ref, atol=1e-10)

    def test_equivalence_random(self, rng):
        s1, c1, c3 = tetra_points(300, rng)
        for a, b, c, t in zip(s1, c1, c3, rng.uniform(0, math.pi / 2, 300)):
            x = XxzState(a, b, c)
            got = tuple(entropy.oracle_spectrum(entropy.oracle_post_matrix(x, t, 0.9)))
            assert_allclose(got, sorted(entropy.post_spectrum(x, t), reverse=True), atol=1e-10)

    def test_theta_reflection(self, sample_state):
        a = tuple(entropy.oracle_spectrum(entropy.oracle_post_matrix(sample_state, 0.6, 0.3)))
        b = tuple(entropy.oracle_spectrum(entropy.oracle_post_matrix(sample_state, math.pi - 0.6, 0.3)))
        assert_allclose(a, b, atol=1e-12)

    def test_not_hermitian(self):
        m = np.zeros((4, 4), dtype=complex)
        m[0, 1] = 1.0
        with pytest.raises(DomainError):
            entropy.oracle_spectrum(m)

    def test_sweep_limit(self):
        with pytest.raises(ConvergenceError):
            entropy.jacobi_eigenvalues(np.array([[1.0, 0.5], [0.5, 2.0]]), max_sweeps=0)
