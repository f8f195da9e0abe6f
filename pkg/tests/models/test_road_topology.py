"""
Tests for road placement and hop-chain decomposition.
"""

import math

import pytest
from hypothesis import given
from hypothesis import strategies as st

from fogcell.exceptions import InvalidParameterError
from fogcell.models.road_topology import (
    HopChain,
    HopMode,
    Placement,
    RoadTopology,
    build_hop_chain,
    hop_chain_from_positions,
    place_vehicles,
)


class TestRoadTopology:
    """Test RoadTopology validation."""

    @pytest.mark.parametrize("length, rho", [(0.0, 0.1), (-5.0, 0.1), (100.0, 0.0)])
    def test_rejects_non_positive(self, length, rho):
        with pytest.raises(InvalidParameterError):
            RoadTopology(length_m=length, density_veh_per_m=rho)

    def test_placement_accepts_string(self):
        topology = RoadTopology(100.0, 0.1, placement="poisson")
        assert topology.placement is Placement.POISSON
        assert topology.spacing_m == pytest.approx(10.0)


class TestPlaceVehicles:
    """Test vehicle placement."""

    def test_equidistant_short_road(self):
        positions = place_vehicles(RoadTopology(50.0, 0.1))
        assert positions == pytest.approx([10.0, 20.0, 30.0, 40.0, 50.0])

    def test_equidistant_too_sparse(self):
        assert place_vehicles(RoadTopology(100.0, 0.005)) == []

    def test_equidistant_spacing(self):
        positions = place_vehicles(RoadTopology(1000.0, 0.08))
        gaps = [b - a for a, b in zip(positions, positions[1:])]
        assert all(gap == pytest.approx(12.5) for gap in gaps)

    def test_poisson_count_and_reproducibility(self):
        topology = RoadTopology(1000.0, 0.08, placement=Placement.POISSON, seed=11)
        positions = place_vehicles(topology)
        assert abs(len(positions) - 80) <= 3 * math.sqrt(80)
        assert positions == place_vehicles(topology)
        assert positions == sorted(positions)
        assert all(0.0 < x <= 1000.0 for x in positions)

    def test_poisson_seed_changes_layout(self):
        a = place_vehicles(RoadTopology(1000.0, 0.08, placement="poisson", seed=1))
        b = place_vehicles(RoadTopology(1000.0, 0.08, placement="poisson", seed=2))
        assert a != b


class TestBuildHopChain:
    """Test hop-chain decomposition."""

    def test_homogeneous_exact_product(self):
        chain = build_hop_chain(300.0, 0.08, HopMode.HOMOGENEOUS)
        assert chain.k == 24
        assert all(h == pytest.approx(12.5) for h in chain.hop_lengths_m)

    def test_residual_exact_division(self):
        chain = build_hop_chain(100.0, 0.03, HopMode.RESIDUAL)
        assert chain.k == 3
        assert chain.hop_lengths_m == pytest.approx([100 / 3] * 3)

    def test_residual_short_last_hop(self):
        chain = build_hop_chain(110.0, 0.03, "residual")
        assert chain.k == 4
        assert chain.hop_lengths_m == pytest.approx([100 / 3] * 3 + [10.0])
        assert chain.total_m == pytest.approx(110.0)

    def test_single_hop_when_source_is_within_spacing(self):
        chain = build_hop_chain(10.0, 0.05)
        assert chain.k == 1
        assert chain.hop_lengths_m == pytest.approx((20.0,))

    @pytest.mark.parametrize("l_a, rho", [(0.0, 0.1), (100.0, 0.0), (-1.0, 0.1)])
    def test_rejects_non_positive(self, l_a, rho):
        with pytest.raises(InvalidParameterError):
            build_hop_chain(l_a, rho)

    def test_rejects_unknown_mode(self):
        with pytest.raises(ValueError):
            build_hop_chain(100.0, 0.05, "zigzag")

    @given(
        l_a=st.floats(min_value=1.0, max_value=2000.0),
        rho=st.floats(min_value=0.001, max_value=1.0),
    )
    def test_residual_hops_sum_to_distance(self, l_a, rho):
        chain = build_hop_chain(l_a, rho, HopMode.RESIDUAL)
        assert chain.k >= 1
        assert all(h > 0 for h in chain.hop_lengths_m)
        assert abs(chain.total_m - l_a) <= 1e-9 * l_a + 1e-9

    @given(
        l_a=st.floats(min_value=1.0, max_value=2000.0),
        rho=st.floats(min_value=0.001, max_value=1.0),
    )
    def test_homogeneous_chain_covers_distance(self, l_a, rho):
        chain = build_hop_chain(l_a, rho, HopMode.HOMOGENEOUS)
        assert chain.total_m >= l_a * (1 - 2e-9) - 1e-9

    def test_hop_count_monotone(self):
        rhos = [0.01 + 0.005 * i for i in range(40)]
        counts = [build_hop_chain(400.0, rho).k for rho in rhos]
        assert counts == sorted(counts)
        distances = [100.0 + 25.0 * i for i in range(30)]
        counts = [build_hop_chain(la, 0.07).k for la in distances]
        assert counts == sorted(counts)

    def test_spacing_exceeds_range_below_critical_density(self):
        assert build_hop_chain(300.0, 0.019).hop_lengths_m[0] > 50.0
        assert build_hop_chain(300.0, 0.021).hop_lengths_m[0] < 50.0


class TestHopChainFromPositions:
    """Test relay chains over explicit positions."""

    def test_chain_to_farthest_vehicle_within_distance(self):
        chain = hop_chain_from_positions([40.0, 10.0, 25.0, 70.0], 50.0)
        assert chain.hop_lengths_m == pytest.approx((15.0, 15.0, 10.0))
        assert chain.total_m == pytest.approx(40.0)

    def test_collapses_duplicates(self):
        chain = hop_chain_from_positions([10.0, 10.0, 20.0], 30.0)
        assert chain.k == 2

    def test_no_vehicle_in_range(self):
        with pytest.raises(InvalidParameterError):
            hop_chain_from_positions([60.0, 80.0], 50.0)

    def test_matches_equidistant_chain(self):
        positions = place_vehicles(RoadTopology(1000.0, 0.08))
        chain = hop_chain_from_positions(positions, 305.0)
        assert chain.k == build_hop_chain(300.0, 0.08).k == 24
        assert all(h == pytest.approx(12.5) for h in chain.hop_lengths_m)
        assert isinstance(chain, HopChain)
