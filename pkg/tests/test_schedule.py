"""Temperature schedules and the annealing driver."""

import numpy as np
import pytest

from qeopt import (
    ProposalKernel,
    SKInstance,
    generate_sk,
    ground_state,
    make_schedule,
    simulated_anneal,
)

from conftest import make_rng


class TestMakeSchedule:
    def test_geometric_midpoint(self):
        sched = make_schedule(10.0, 0.1, 3)
        np.testing.assert_allclose(sched.values, [10.0, 1.0, 0.1], rtol=1e-12)

    def test_two_point_endpoints_only(self):
        assert make_schedule(10.0, 0.1, 2).values == (10.0, 0.1)

    def test_length_151_exact_endpoints_constant_ratio(self):
        sched = make_schedule(10.0, 0.1, 151)
        assert sched.values[0] == 10.0
        assert sched.values[-1] == 0.1
        ratios = [b / a for a, b in zip(sched.values, sched.values[1:])]
        np.testing.assert_allclose(ratios, ratios[0], rtol=1e-12)

    def test_strictly_decreasing(self):
        sched = make_schedule(10.0, 0.1, 40)
        assert all(a > b for a, b in zip(sched.values, sched.values[1:]))

    def test_degenerate_single_value(self):
        assert make_schedule(10.0, 0.1, 1).values == (10.0,)

    def test_invalid_temperatures(self):
        with pytest.raises(ValueError):
            make_schedule(0.1, 10.0, 5)
        with pytest.raises(ValueError):
            make_schedule(10.0, 0.0, 5)
        with pytest.raises(ValueError):
            make_schedule(10.0, 0.1, 0)


class TestSimulatedAnneal:
    def test_single_step_budget(self):
        inst = generate_sk(4, 2)
        res = simulated_anneal(
            inst, ProposalKernel.local(), make_schedule(10, 0.1, 1), make_rng(0)
        )
        assert res.proposals == 1

    def test_budget_equals_schedule_length(self):
        inst = generate_sk(4, 2)
        for length in (1, 7, 43):
            res = simulated_anneal(
                inst,
                ProposalKernel.local(),
                make_schedule(10, 0.1, length),
                make_rng(1),
            )
            assert res.proposals == length

    def test_zero_instance_every_state_optimal(self):
        inst = SKInstance(n=3, linear=np.zeros(3), quadratic=np.zeros((3, 3)), seed=0)
        res = simulated_anneal(
            inst,
            ProposalKernel.local(),
            make_schedule(10, 0.1, 5),
            make_rng(2),
            ground_energy=0.0,
        )
        assert res.success_by_best is True

    def test_success_flags_none_without_ground(self):
        inst = generate_sk(3, 4)
        res = simulated_anneal(
            inst, ProposalKernel.local(), make_schedule(10, 0.1, 5), make_rng(3)
        )
        assert res.success_by_best is None
        assert res.success_by_final is None

    def test_best_dominates_final(self):
        inst = generate_sk(6, 11)
        _, ge = ground_state(inst)
        for seed in range(40):
            res = simulated_anneal(
                inst,
                ProposalKernel.local(),
                make_schedule(10, 0.1, 60),
                make_rng(seed),
                ground_energy=ge,
            )
            assert res.best_energy <= res.final_energy + 1e-12
            assert res.success_by_best >= res.success_by_final

    def test_reproducible(self):
        inst = generate_sk(5, 20)
        _, ge = ground_state(inst)
        a = simulated_anneal(
            inst,
            ProposalKernel.quantum(t_range=(2, 5)),
            make_schedule(10, 0.1, 30),
            make_rng(77),
            ground_energy=ge,
        )
        b = simulated_anneal(
            inst,
            ProposalKernel.quantum(t_range=(2, 5)),
            make_schedule(10, 0.1, 30),
            make_rng(77),
            ground_energy=ge,
        )
        assert a.best.index == b.best.index
        assert a.best_energy == b.best_energy
        assert a.final.index == b.final.index

    def test_long_anneal_usually_succeeds(self):
        hits = 0
        for seed in range(30):
            inst = generate_sk(5, 500 + seed)
            _, ge = ground_state(inst)
            res = simulated_anneal(
                inst,
                ProposalKernel.local(),
                make_schedule(10, 0.1, 400),
                make_rng(seed),
                ground_energy=ge,
            )
            hits += res.success_by_best
        assert hits >= 20
