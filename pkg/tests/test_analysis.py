"""Boltzmann, transition matrices, spectral gaps, thermalization, effort."""

import math

import numpy as np
import pytest

from qeopt import (
    CapExceededError,
    InsufficientDataError,
    ProposalKernel,
    SKInstance,
    boltzmann,
    delta_min,
    effort,
    exact_proposal_matrix,
    generate_sk,
    make_schedule,
    measure_mixing_time,
    optimal_length,
    repeats_needed,
    spectral_gap,
    success_probability,
    thermalization_bounds,
    transition_matrix,
    tv_distance,
)
from qeopt.analysis import TransitionMatrix

from conftest import make_rng


def zero_instance(n):
    return SKInstance(n=n, linear=np.zeros(n), quadratic=np.zeros((n, n)), seed=0)


class TestBoltzmann:
    def test_zero_instance_uniform(self):
        mu = boltzmann(zero_instance(3), 1.0)
        np.testing.assert_allclose(mu, 1 / 8)

    def test_huge_temperature_uniform(self):
        mu = boltzmann(generate_sk(4, 3), 1e9)
        np.testing.assert_allclose(mu, 1 / 16, atol=1e-6)

    def test_hand_instance_closed_form(self):
        # n=2, linear=[1,0]: f = -s_0, so mu ∝ [e, 1/e, e, 1/e] at T=1
        inst = SKInstance(
            n=2, linear=np.array([1.0, 0.0]), quadratic=np.zeros((2, 2)), seed=0
        )
        mu = boltzmann(inst, 1.0)
        raw = np.array([np.e, 1 / np.e, np.e, 1 / np.e])
        np.testing.assert_allclose(mu, raw / raw.sum(), rtol=1e-12)

    def test_normalized(self):
        mu = boltzmann(generate_sk(6, 9), 0.1)
        assert abs(mu.sum() - 1.0) < 1e-12

    def test_invalid_temperature(self):
        with pytest.raises(ValueError):
            boltzmann(zero_instance(2), 0.0)


class TestTransitionMatrix:
    def test_infinite_temperature_equals_proposal(self):
        inst = generate_sk(3, 5)
        q = exact_proposal_matrix(inst, ProposalKernel.local())
        tm = transition_matrix(inst, q, 1e9)
        np.testing.assert_allclose(tm.entries, q, atol=1e-6)

    def test_single_spin_closed_form(self):
        inst = SKInstance(n=1, linear=np.array([1.0]), quadratic=np.zeros((1, 1)), seed=0)
        q = exact_proposal_matrix(inst, ProposalKernel.local())
        tm = transition_matrix(inst, q, 1.0)
        # states: 0 -> spin +1 (f=-1), 1 -> spin -1 (f=+1)
        expected = np.array(
            [[1.0 - np.exp(-2.0), np.exp(-2.0)], [1.0, 0.0]]
        )
        np.testing.assert_allclose(tm.entries, expected, rtol=1e-12)

    @pytest.mark.parametrize("kind", ["local", "uniform", "quantum"])
    def test_stationarity(self, kind):
        inst = generate_sk(4, 8)
        kernel = (
            ProposalKernel.quantum(t_range=(2, 5)) if kind == "quantum" else ProposalKernel(kind)
        )
        q = exact_proposal_matrix(inst, kernel, gamma_nodes=3)
        tm = transition_matrix(inst, q, 0.7, kind)
        np.testing.assert_allclose(tm.stationary @ tm.entries, tm.stationary, atol=1e-10)

    def test_detailed_balance(self):
        inst = generate_sk(4, 2)
        q = exact_proposal_matrix(inst, ProposalKernel.local())
        tm = transition_matrix(inst, q, 0.5)
        flow = tm.stationary[:, None] * tm.entries
        np.testing.assert_allclose(flow, flow.T, atol=1e-10)

    def test_rejects_asymmetric_proposal(self):
        inst = generate_sk(2, 2)
        q = exact_proposal_matrix(inst, ProposalKernel.local())
        q = q.copy()
        q[0, 1] += 1e-6
        q[0, 0] -= 1e-6
        with pytest.raises(ValueError):
            transition_matrix(inst, q, 1.0)


class TestSpectralGap:
    def test_uniform_kernel_infinite_temperature(self):
        # with a flat objective the acceptance is exactly 1, so P is exactly
        # the uniform matrix and the gap is exactly 1
        inst = zero_instance(3)
        q = exact_proposal_matrix(inst, ProposalKernel.uniform())
        tm = transition_matrix(inst, q, 1e9)
        assert spectral_gap(tm) == pytest.approx(1.0, abs=1e-9)

    def test_uniform_kernel_near_one_at_huge_temperature(self):
        # generic instance: the deviation is bounded by the energy range / T
        inst = generate_sk(3, 4)
        q = exact_proposal_matrix(inst, ProposalKernel.uniform())
        tm = transition_matrix(inst, q, 1e9)
        e = inst.energy_table()
        bound = (e.max() - e.min()) / 1e9 + 1e-12
        assert spectral_gap(tm) == pytest.approx(1.0, abs=bound)

    def test_identity_matrix_gap_zero(self):
        dim = 8
        tm = TransitionMatrix(
            entries=np.eye(dim),
            temperature=1.0,
            kernel="degenerate",
            stationary=np.full(dim, 1 / dim),
        )
        assert spectral_gap(tm) == 0.0

    def test_matches_nonsymmetric_eigensolve(self):
        for seed in (1, 2, 3):
            inst = generate_sk(3, seed)
            q = exact_proposal_matrix(inst, ProposalKernel.local())
            tm = transition_matrix(inst, q, 1.0)
            # oracle: generic eigensolver on the unsymmetrized matrix
            eigs = np.linalg.eigvals(tm.entries)
            top = int(np.argmin(np.abs(eigs - 1.0)))
            rest = np.abs(np.delete(eigs, top))
            assert spectral_gap(tm) == pytest.approx(1.0 - rest.max(), abs=1e-9)

    def test_eigenvalue_sanity(self):
        inst = generate_sk(4, 11)
        q = exact_proposal_matrix(inst, ProposalKernel.quantum(t_range=(2, 4)), gamma_nodes=2)
        tm = transition_matrix(inst, q, 0.3)
        eigs = np.linalg.eigvals(tm.entries)
        assert np.abs(eigs).max() <= 1.0 + 1e-9
        assert np.sum(np.abs(eigs - 1.0) < 1e-9) == 1

    def test_rejects_nonstochastic(self):
        tm = TransitionMatrix(
            entries=np.array([[0.5, 0.6], [0.5, 0.5]]),
            temperature=1.0,
            kernel="bad",
            stationary=np.array([0.5, 0.5]),
        )
        with pytest.raises(ValueError):
            spectral_gap(tm)


class TestThermalizationBounds:
    def test_delta_one_lower_bound_zero(self):
        lower, upper = thermalization_bounds(1.0, np.full(4, 0.25), 0.01)
        assert lower == 0.0
        assert upper == pytest.approx(math.log(1 / (0.01 * 0.25)))

    def test_closed_form_half(self):
        lower, upper = thermalization_bounds(0.5, np.full(4, 0.25), 0.25)
        assert lower == pytest.approx(math.log(2.0))
        assert upper == pytest.approx(2.0 * math.log(16.0))

    def test_delta_zero_unbounded_signal(self):
        lower, upper = thermalization_bounds(0.0, np.full(4, 0.25))
        assert math.isinf(lower) and math.isinf(upper)

    def test_bracket_measured_mixing_time(self):
        # oracle: iterated vector-matrix products tracking worst-case TV
        inst = generate_sk(3, 21)
        q = exact_proposal_matrix(inst, ProposalKernel.local())
        tm = transition_matrix(inst, q, 1.0)
        delta = spectral_gap(tm)
        eps = 0.01
        lower, upper = thermalization_bounds(delta, tm.stationary, eps)
        tau = measure_mixing_time(tm, eps)
        assert lower <= tau <= upper

    def test_epsilon_validated(self):
        with pytest.raises(ValueError):
            thermalization_bounds(0.5, np.full(2, 0.5), 0.5)


class TestDeltaMin:
    def test_single_temperature_equals_spectral_gap(self):
        inst = generate_sk(3, 31)
        kernel = ProposalKernel.local()
        sched = make_schedule(1.0, 0.5, 1)
        got = delta_min(inst, kernel, sched)
        q = exact_proposal_matrix(inst, kernel)
        want = spectral_gap(transition_matrix(inst, q, 1.0))
        assert got.delta == pytest.approx(want, abs=1e-12)
        assert got.temperature == 1.0

    def test_min_below_every_grid_value(self):
        inst = generate_sk(4, 32)
        kernel = ProposalKernel.local()
        sched = make_schedule(10.0, 0.1, 6)
        got = delta_min(inst, kernel, sched)
        q = exact_proposal_matrix(inst, kernel)
        for t in sched.values:
            assert got.delta <= spectral_gap(transition_matrix(inst, q, t)) + 1e-12

    def test_argmin_is_usually_the_coldest_temperature(self):
        # low-temperature bottleneck: argmin T = lowest grid T in the majority
        hits = 0
        sched = make_schedule(10.0, 0.1, 5)
        for seed in range(20):
            inst = generate_sk(5, 8800 + seed)
            got = delta_min(inst, ProposalKernel.local(), sched)
            hits += got.temperature == pytest.approx(0.1)
        assert hits > 10


class TestSuccessMetrics:
    def test_all_true(self):
        p, hw = success_probability([True] * 8)
        assert p == 1.0
        assert 0.0 < hw < 0.5

    def test_half(self):
        p, _ = success_probability([True, False])
        assert p == 0.5

    def test_wilson_interval_covers_synthetic_rate(self):
        rng = make_rng(12)
        draws = rng.random(10_000) < 0.3
        p, hw = success_probability(list(draws))
        assert p == pytest.approx(0.3, abs=0.01)
        assert abs(p - 0.3) < 2.5 * hw

    def test_empty_rejected(self):
        with pytest.raises(ValueError):
            success_probability([])

    def test_repeats_closed_forms(self):
        assert repeats_needed(0.99, 0.99) == 1.0
        assert repeats_needed(0.5, 0.99) == pytest.approx(6.643856, abs=1e-4)
        assert math.isinf(repeats_needed(0.0, 0.99))
        assert repeats_needed(1.0, 0.99) == 1.0
        assert repeats_needed(0.9999, 0.5) == 1.0  # floored

    def test_repeats_validation(self):
        with pytest.raises(ValueError):
            repeats_needed(0.5, 1.0)
        with pytest.raises(ValueError):
            repeats_needed(-0.1, 0.99)

    def test_effort_arithmetic(self):
        assert effort(10, 1.0, 1) == 10.0
        assert effort(100, 2.5, 4) == 1000.0
        assert math.isinf(effort(10, math.inf, 2))

    def test_effort_monotone_in_success_probability(self):
        efforts = [
            effort(50, repeats_needed(p, 0.99), 1)
            for p in (0.05, 0.1, 0.3, 0.6, 0.9)
        ]
        assert all(a >= b for a, b in zip(efforts, efforts[1:]))


class TestOptimalLength:
    def test_recovers_exact_quadratic_vertex(self):
        lengths = [8, 16, 32, 64, 128, 256]
        a, b, c = 2.0, -16.0, 40.0
        pts = [(l, a * math.log(l) ** 2 + b * math.log(l) + c) for l in lengths]
        fit = optimal_length(pts)
        assert fit.vertex_from_fit
        assert fit.l_star == pytest.approx(math.exp(-b / (2 * a)), rel=1e-6)

    def test_all_infinite_rejected(self):
        with pytest.raises(InsufficientDataError):
            optimal_length([(10, math.inf), (20, math.inf), (40, math.inf)])

    def test_too_few_points_rejected(self):
        with pytest.raises(InsufficientDataError):
            optimal_length([(10, 5.0), (20, math.inf)])

    def test_stable_under_jitter(self):
        # convex noisy sweep: vertex stays inside the basin under 5% jitter
        rng = make_rng(5)
        lengths = [10, 14, 20, 28, 40, 57, 80, 113, 160]
        true_vertex = 40.0
        base = [
            (l, 100.0 * (1.0 + (math.log(l) - math.log(true_vertex)) ** 2))
            for l in lengths
        ]
        stars = []
        for _ in range(20):
            noisy = [(l, e * (1.0 + 0.05 * (rng.random() * 2 - 1))) for l, e in base]
            stars.append(optimal_length(noisy).l_star)
        assert all(20 <= s <= 80 for s in stars)

    def test_subset_rule_grows_to_five_points(self):
        # one deep minimum: threshold picks 1 point, rule must expand to 5
        pts = [(10, 1.0), (20, 10.0), (40, 11.0), (80, 12.0), (160, 13.0), (320, 14.0)]
        fit = optimal_length(pts)
        assert len(fit.subset_lengths) == 5

    def test_clamped_to_sweep_range(self):
        pts = [(10, 50.0), (20, 40.0), (40, 30.0), (80, 20.0), (160, 10.0)]
        fit = optimal_length(pts)
        assert 10 <= fit.l_star <= 160


class TestTVDistance:
    def test_identical(self):
        assert tv_distance([0.5, 0.5], [0.5, 0.5]) == 0.0

    def test_disjoint_one_hots(self):
        assert tv_distance([1.0, 0.0], [0.0, 1.0]) == 1.0

    def test_closed_form(self):
        assert tv_distance([0.75, 0.25], [0.25, 0.75]) == 0.5

    def test_length_mismatch(self):
        with pytest.raises(ValueError):
            tv_distance([1.0], [0.5, 0.5])

    def test_unnormalized_rejected(self):
        with pytest.raises(ValueError):
            tv_distance([0.5, 0.4], [0.5, 0.5])


class TestKernelGapOrdering:
    def test_quantum_gap_beats_local_at_low_temperature(self):
        # average-case claim at n=6, T=0.1, >= 20 instances
        from scipy import stats

        diffs = []
        for seed in range(20):
            inst = generate_sk(6, 31000 + seed)
            q_local = exact_proposal_matrix(inst, ProposalKernel.local())
            q_quant = exact_proposal_matrix(
                inst, ProposalKernel.quantum(), gamma_nodes=4
            )
            d_local = spectral_gap(transition_matrix(inst, q_local, 0.1))
            d_quant = spectral_gap(transition_matrix(inst, q_quant, 0.1))
            diffs.append(d_quant - d_local)
        assert np.mean(diffs) > 0.0
        res = stats.ttest_rel(diffs, np.zeros(len(diffs)), alternative="greater")
        assert res.pvalue < 0.05
