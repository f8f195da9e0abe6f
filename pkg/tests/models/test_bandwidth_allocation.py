"""
Tests for traditional and adaptive bandwidth allocation.
"""

import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from fogcell.confidence import is_non_decreasing_within_ci
from fogcell.exceptions import InvalidParameterError
from fogcell.models.bandwidth_allocation import (
    CellCapacity,
    DemandProfile,
    Scheme,
    allocate_adaptive,
    allocate_traditional,
    count_below_average,
    demand_block,
    mean_throughput,
    sample_demands,
    sweep_throughput,
    throughput_samples,
)


def profile(*demands):
    return DemandProfile(n=len(demands), demands=tuple(demands), seed=0)


class TestCellCapacity:
    """Test CellCapacity construction."""

    def test_from_throughput(self, capacity):
        assert capacity.b_total == 1.0
        assert capacity.b_ave == pytest.approx(0.033)
        assert capacity.mbps_per_unit == 1000.0

    def test_served_slots(self, capacity):
        assert capacity.served_slots == 30

    def test_rejects_disproportionate_values(self):
        with pytest.raises(InvalidParameterError) as exc_info:
            CellCapacity(b_total=1.0, c_total=1000.0, b_ave=0.05, c_ave=33.0)
        assert exc_info.value.parameter == "c_ave"

    @pytest.mark.parametrize("c_total, c_ave", [(0.0, 33.0), (1000.0, 0.0), (-1.0, 33.0)])
    def test_rejects_non_positive(self, c_total, c_ave):
        with pytest.raises(InvalidParameterError):
            CellCapacity.from_throughput(c_total=c_total, c_ave=c_ave)


class TestSampleDemands:
    """Test demand sampling."""

    def test_empty(self, capacity):
        assert sample_demands(0, capacity, seed=1).demands == ()

    def test_rejects_negative_count(self, capacity):
        with pytest.raises(InvalidParameterError):
            sample_demands(-1, capacity, seed=1)

    def test_deterministic(self, capacity):
        assert sample_demands(20, capacity, seed=9) == sample_demands(20, capacity, seed=9)
        assert sample_demands(20, capacity, seed=9) != sample_demands(20, capacity, seed=10)

    def test_range_and_mean(self, capacity):
        demands = sample_demands(100_000, capacity, seed=4).demands
        assert all(0.0 <= d <= 2 * capacity.b_ave for d in demands)
        assert np.mean(demands) == pytest.approx(capacity.b_ave, rel=0.01)

    def test_count_below_average(self, capacity):
        a = capacity.b_ave
        assert count_below_average(profile(0.5 * a, 1.5 * a, 0.1 * a), capacity) == 2


class TestAllocateTraditional:
    """Test the per-vehicle capped allocation."""

    def test_below_average_demand_passes_through(self, capacity):
        outcome = allocate_traditional(profile(capacity.b_ave / 2), capacity)
        assert outcome.per_vehicle_alloc == pytest.approx((capacity.b_ave / 2,))
        assert outcome.throughput_mbps == pytest.approx(16.5)

    def test_capped_at_average(self, capacity):
        outcome = allocate_traditional(profile(2 * capacity.b_ave), capacity)
        assert outcome.total_alloc == pytest.approx(capacity.b_ave)
        assert outcome.throughput_mbps == pytest.approx(33.0)

    def test_only_first_slots_served(self, capacity):
        demands = [capacity.b_ave] * 40
        outcome = allocate_traditional(profile(*demands), capacity)
        assert all(a > 0 for a in outcome.per_vehicle_alloc[:30])
        assert all(a == 0 for a in outcome.per_vehicle_alloc[30:])
        assert outcome.throughput_mbps == pytest.approx(30 * 33.0)

    def test_matches_traditional_throughput_formula(self, capacity):
        # Vehicles below B_ave contribute their own throughput, the rest contribute C_ave
        demands = sample_demands(12, capacity, seed=21)
        below = [d for d in demands.demands if d < capacity.b_ave]
        expected = sum(d * 1000.0 for d in below) + (12 - len(below)) * 33.0
        assert allocate_traditional(demands, capacity).throughput_mbps == pytest.approx(expected)


class TestAllocateAdaptive:
    """Test the pooled allocation."""

    def test_no_contention(self, capacity):
        demands = (0.01, 0.05, 0.02)
        outcome = allocate_adaptive(profile(*demands), capacity)
        assert outcome.per_vehicle_alloc == demands
        assert outcome.total_alloc == pytest.approx(0.08)

    def test_empty_cell(self, capacity):
        outcome = allocate_adaptive(profile(), capacity)
        assert outcome.throughput_mbps == 0.0

    def test_proportional_scale_down(self, capacity):
        outcome = allocate_adaptive(profile(2 / 3, 2 / 3), capacity)
        assert outcome.per_vehicle_alloc == pytest.approx((0.5, 0.5))
        assert outcome.total_alloc == 1.0
        assert outcome.throughput_mbps == 1000.0


class TestAllocationProperties:
    """Invariants shared by both schemes."""

    @settings(max_examples=200)
    @given(
        demands=st.lists(st.floats(min_value=0.0, max_value=0.066), min_size=0, max_size=60)
    )
    def test_invariants(self, demands):
        capacity = CellCapacity.from_throughput()
        p = DemandProfile(n=len(demands), demands=tuple(demands), seed=0)
        traditional = allocate_traditional(p, capacity)
        adaptive = allocate_adaptive(p, capacity)
        for outcome in (traditional, adaptive):
            assert outcome.total_alloc <= capacity.b_total
            assert outcome.throughput_mbps <= capacity.c_total
            assert all(
                0.0 <= a <= d * (1 + 1e-12) for a, d in zip(outcome.per_vehicle_alloc, demands)
            )
            assert math.fsum(outcome.per_vehicle_alloc) == pytest.approx(
                outcome.total_alloc, rel=1e-9, abs=1e-15
            )
        assert adaptive.throughput_mbps >= traditional.throughput_mbps
        assert traditional.throughput_mbps <= min(len(demands), 30) * capacity.c_ave + 1e-9

    def test_dominance_on_seeded_profiles(self, capacity):
        for n in (1, 10, 29, 30, 31, 50):
            for seed in range(200):
                p = sample_demands(n, capacity, seed=seed)
                assert (
                    allocate_adaptive(p, capacity).throughput_mbps
                    >= allocate_traditional(p, capacity).throughput_mbps
                )

    @pytest.mark.parametrize("n", [1, 10, 30, 31, 50])
    def test_samples_match_allocators_row_by_row(self, capacity, n):
        samples = throughput_samples(n, capacity, trials=500, seed=7)
        demands = demand_block(n, capacity, seed=7, block=0, size=500)
        for i, row in enumerate(demands):
            p = DemandProfile(n=n, demands=tuple(float(d) for d in row), seed=7)
            assert samples[Scheme.TRADITIONAL][i] == pytest.approx(
                allocate_traditional(p, capacity).throughput_mbps, rel=1e-12
            )
            assert samples[Scheme.ADAPTIVE][i] == pytest.approx(
                allocate_adaptive(p, capacity).throughput_mbps, rel=1e-12
            )

    def test_second_block_continues_the_trial_sequence(self, capacity):
        samples = throughput_samples(3, capacity, trials=4100, seed=2)
        demands = demand_block(3, capacity, seed=2, block=1, size=4)
        for i, row in enumerate(demands):
            p = DemandProfile(n=3, demands=tuple(float(d) for d in row), seed=2)
            assert samples[Scheme.ADAPTIVE][4096 + i] == pytest.approx(
                allocate_adaptive(p, capacity).throughput_mbps, rel=1e-12
            )

    @pytest.mark.slow
    def test_dominance_on_every_profile(self, capacity):
        for n in range(1, 51):
            samples = throughput_samples(n, capacity, trials=10_000, seed=1)
            assert samples[Scheme.TRADITIONAL].shape == (10_000,)
            assert np.all(samples[Scheme.ADAPTIVE] >= samples[Scheme.TRADITIONAL])


class TestMeanThroughput:
    """Test Monte-Carlo throughput estimates."""

    def test_rejects_zero_trials(self, capacity):
        with pytest.raises(InvalidParameterError):
            mean_throughput(Scheme.ADAPTIVE, 10, capacity, trials=0, seed=1)

    def test_deterministic(self, capacity):
        first = mean_throughput(Scheme.TRADITIONAL, 12, capacity, trials=5000, seed=3)
        assert first == mean_throughput(Scheme.TRADITIONAL, 12, capacity, trials=5000, seed=3)

    def test_traditional_ten_vehicles(self, capacity):
        mean, ci = mean_throughput(Scheme.TRADITIONAL, 10, capacity, trials=100_000, seed=1)
        assert mean == pytest.approx(247.5, rel=0.02)
        assert 0 < ci < 2.0

    def test_adaptive_ten_vehicles(self, capacity):
        mean, _ = mean_throughput(Scheme.ADAPTIVE, 10, capacity, trials=100_000, seed=1)
        assert mean == pytest.approx(330.0, rel=0.02)

    def test_adaptive_saturates(self, capacity):
        mean, _ = mean_throughput(Scheme.ADAPTIVE, 50, capacity, trials=100_000, seed=1)
        assert mean == pytest.approx(1000.0, rel=0.01)

    def test_traditional_flat_above_thirty(self, capacity):
        at_30, _ = mean_throughput(Scheme.TRADITIONAL, 30, capacity, trials=100_000, seed=1)
        at_50, _ = mean_throughput(Scheme.TRADITIONAL, 50, capacity, trials=100_000, seed=1)
        assert abs(at_30 - at_50) / at_30 < 0.005


class TestSweepThroughput:
    """Test the vehicle-count sweep."""

    def test_row_order_and_dominance(self, capacity):
        points = sweep_throughput(8, capacity, trials=2000, seed=2)
        assert [(p.n, p.scheme) for p in points[:4]] == [
            (1, Scheme.TRADITIONAL),
            (1, Scheme.ADAPTIVE),
            (2, Scheme.TRADITIONAL),
            (2, Scheme.ADAPTIVE),
        ]
        assert len(points) == 16
        for traditional, adaptive in zip(points[::2], points[1::2]):
            assert adaptive.mean_mbps >= traditional.mean_mbps

    def test_workers_do_not_change_rows(self, capacity):
        serial = sweep_throughput(12, capacity, trials=3000, seed=5, workers=1)
        threaded = sweep_throughput(12, capacity, trials=3000, seed=5, workers=4)
        assert serial == threaded

    @pytest.mark.parametrize("kwargs", [{"n_max": 0}, {"trials": 0}])
    def test_rejects_bad_arguments(self, capacity, kwargs):
        args = {"n_max": 5, "trials": 100, **kwargs}
        with pytest.raises(InvalidParameterError):
            sweep_throughput(args["n_max"], capacity, trials=args["trials"], seed=1)

    @pytest.mark.slow
    def test_means_non_decreasing_in_vehicle_count(self, capacity):
        points = sweep_throughput(50, capacity, trials=100_000, seed=1, workers=4)
        for scheme in Scheme:
            rows = [p for p in points if p.scheme is scheme]
            assert is_non_decreasing_within_ci(
                [p.mean_mbps for p in rows], [p.ci95_mbps for p in rows]
            )
