import math

import numpy as np
import pytest
from hypothesis import given, settings
from numpy.testing import assert_allclose

from deficit_atlas import correlations, entropy
from deficit_atlas.correlations import PhaseLabel
from deficit_atlas.errors import DomainError
from deficit_atlas.state import XxzState

from conftest import tetra_points, xxz_states

LN2 = math.log(2)


def h(x):
    return -sum(p * math.log(p) for p in (x, 1 - x) if p > 0)


def oracle_deficit(x, theta):
    m = entropy.oracle_post_matrix(x, theta, 0.0)
    lam = np.clip(np.linalg.eigvalsh(m), 1e-300, None)
    return float(-np.sum(lam * np.log(lam))) - entropy.pre_entropy(x)


class TestBranches:

    def test_maximally_mixed(self):
        x = XxzState(0, 0, 0)
        for t in (0.0, 0.5, math.pi / 2):
            assert abs(correlations.deficit_at(x, t)) < 1e-15

    def test_deficit_at_oracle(self, sample_state):
        assert_allclose(correlations.deficit_at(sample_state, 0.7),
                        oracle_deficit(sample_state, 0.7), rtol=1e-12)

    @pytest.mark.parametrize("s1, c3", [(0.0, 0.0), (0.3, 0.2), (-0.2, -0.5)])
    def test_zero_branch_vanishes_without_c1(self, s1, c3):
        assert abs(correlations.deficit_branch_0(XxzState(s1, 0.0, c3))) < 1e-15

    def test_zero_branch_value(self):
        assert_allclose(correlations.deficit_branch_0(XxzState(0.1, 0.5, 0.0)), LN2 / 2, rtol=1e-14)
        assert_allclose(correlations.deficit_branch_0(XxzState(-0.3, 0.5, 0.0)), LN2 / 2, rtol=1e-14)

    @pytest.mark.parametrize("c3", [-0.6, 0.0, 0.4])
    def test_pi_half_at_origin(self, c3):
        expected = 0.5 * ((1 - c3) * math.log(1 - c3) + (1 + c3) * math.log(1 + c3))
        assert_allclose(correlations.deficit_branch_pi2(XxzState(0, 0, c3)), expected,
                        rtol=1e-13, atol=1e-16)

    @pytest.mark.parametrize("c1", [0.0, 0.3, 0.8, 1.0])
    def test_bell_edge_branches(self, c1):
        x = XxzState(0.0, c1, -1.0)
        assert_allclose(correlations.deficit_branch_0(x), correlations.bell_diagonal_value(c1),
                        atol=1e-14)
        assert_allclose(correlations.deficit_branch_pi2(x), LN2, atol=1e-14)

    def test_branch_consistency(self, rng):
        for s1, c1, c3 in zip(*tetra_points(10**4 // 10, rng)):
            x = XxzState(s1, c1, c3)
            assert_allclose(correlations.deficit_branch_0(x), correlations.deficit_at(x, 0.0), atol=1e-12)
            assert_allclose(correlations.deficit_branch_pi2(x),
                            correlations.deficit_at(x, math.pi / 2), atol=1e-12)

    @pytest.mark.parametrize("c1, expected", [
        (0.0, 0.0), (1.0, LN2), (-1.0, LN2), (0.5, 0.5 * (1.5 * math.log(1.5) + 0.5 * math.log(0.5))),
    ])
    def test_bell_diagonal_value(self, c1, expected):
        assert_allclose(correlations.bell_diagonal_value(c1), expected, rtol=1e-12, atol=1e-16)

    def test_bell_diagonal_domain(self):
        with pytest.raises(DomainError):
            correlations.bell_diagonal_value(1.5)


class TestMinimizer:

    def test_golden_section(self):
        x, fx = correlations.golden_section(lambda t: (t - 0.3) ** 2, 0.0, 1.0)
        assert_allclose(x, 0.3, atol=1e-9)

    def test_flat_profile(self):
        theta, value = correlations.minimize_interior(XxzState(0, 0, 0))
        assert abs(value) < 1e-15

    def test_equal_depth_bimodal(self):
        x = XxzState(0.4, 0.576208, -0.2)
        res = correlations.deficit(x)
        zero, _, inner = res.branch_values
        assert inner is not None
        assert_allclose(inner, zero, atol=1e-6)

    def test_interior_minimizer(self):
        theta, value = correlations.minimize_interior(XxzState(0.44, 0.425, 0.15))
        assert 1e-3 < theta < math.pi / 2 - 1e-3

    def test_dense_grid_agreement(self, sample_state):
        grid = np.linspace(0, math.pi / 2, 10**5)
        dense = correlations.deficit_profile(0.2, 0.3, 0.1, grid).min()
        assert_allclose(correlations.deficit(sample_state).value, dense, atol=1e-10)

    def test_vectorized_matches_scalar(self, rng):
        s1, c1, c3 = tetra_points(50, rng)
        batch = correlations.optimize_many(s1, c1, c3)
        for i in range(50):
            res = correlations.deficit(XxzState(s1[i], c1[i], c3[i]))
            assert_allclose(batch.value[i], res.value, atol=1e-15)
            assert batch.phase[i] == res.phase


class TestDeficit:

    @pytest.mark.parametrize("x", [(0.1, 0.2, 0.4), (0.6, 0.1, 0.5), (-0.3, -0.25, 1 / 3 + 0.01)])
    def test_upper_band_is_zero_phase(self, x):
        assert correlations.deficit(XxzState(*x)).phase == PhaseLabel.ZERO

    @pytest.mark.parametrize("c1", [0.2, 0.5, 0.9])
    def test_bell_edge(self, c1):
        res = correlations.deficit(XxzState(0.0, c1, -1.0))
        assert_allclose(res.value, correlations.bell_diagonal_value(c1), atol=1e-10)

    def test_theta_phase(self):
        res = correlations.deficit(XxzState(0.44, 0.425, 0.15))
        assert res.phase == PhaseLabel.THETA
        assert 0 < res.theta_opt < math.pi / 2

    def test_tie_prefers_zero(self):
        # the profile is flat on the Bell vertex
        res = correlations.deficit(XxzState(0.0, 1.0, -1.0))
        assert res.phase == PhaseLabel.ZERO
        assert_allclose(res.value, LN2, rtol=1e-12)

    def test_classical_states(self, rng):
        for s1, c3 in zip(rng.uniform(-0.4, 0.4, 30), rng.uniform(-0.2, 0.2, 30)):
            assert abs(correlations.deficit(XxzState(s1, 0.0, c3)).value) < 1e-12

    def test_result_invariants(self, rng):
        s1, c1, c3 = tetra_points(200, rng)
        for a, b, c in zip(s1, c1, c3):
            res = correlations.deficit(XxzState(a, b, c))
            branches = [v for v in res.branch_values if v is not None]
            assert res.value >= -1e-10
            assert_allclose(res.value, min(branches), atol=1e-12)

    @settings(max_examples=60, deadline=None)
    @given(xxz_states())
    def test_reflection_invariance(self, x):
        base = correlations.deficit(x)
        for other in (x.reflected(-1, 1), x.reflected(1, -1)):
            res = correlations.deficit(other)
            assert_allclose(res.value, base.value, atol=1e-10)

    @settings(max_examples=100, deadline=None)
    @given(xxz_states(), )
    def test_nonnegative_profile(self, x):
        grid = np.linspace(0, math.pi / 2, 41)
        assert correlations.deficit_profile(x.s1, x.c1, x.c3, grid).min() >= -1e-10

    def test_angle_domain(self, sample_state):
        with pytest.raises(DomainError):
            correlations.deficit_at(sample_state, -0.1)


class TestDiscord:

    def test_zero_magnetization(self):
        x = XxzState(0.0, 0.35, -0.3)
        for t in (0.0, 0.6, math.pi / 2):
            assert_allclose(correlations.discord_at(x, t), correlations.deficit_at(x, t), atol=1e-15)
        assert_allclose(correlations.discord(x).value, correlations.deficit(x).value, atol=1e-12)

    def test_zero_angle_exact(self, rng):
        for s1, c1, c3 in zip(*tetra_points(200, rng)):
            x = XxzState(s1, c1, c3)
            assert correlations.discord_at(x, 0.0) == correlations.deficit_at(x, 0.0)

    def test_pi_half(self, sample_state):
        expected = correlations.deficit_at(sample_state, math.pi / 2) + h(0.6) - h(0.5)
        assert_allclose(correlations.discord_at(sample_state, math.pi / 2), expected, rtol=1e-13)

    def test_dense_grid(self, sample_state):
        grid = np.linspace(0, math.pi / 2, 10**5)
        dense = correlations.discord_profile(0.2, 0.3, 0.1, grid).min()
        assert_allclose(correlations.discord(sample_state).value, dense, atol=1e-10)

    def test_both_zero_phase_agree(self, rng):
        s1, c1, c3 = tetra_points(300, rng)
        d = correlations.optimize_many(s1, c1, c3, "deficit")
        q = correlations.optimize_many(s1, c1, c3, "discord")
        both = (d.phase == PhaseLabel.ZERO) & (q.phase == PhaseLabel.ZERO)
        assert both.any()
        assert_allclose(d.value[both], q.value[both], atol=1e-12)
