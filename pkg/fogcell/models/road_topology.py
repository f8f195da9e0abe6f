"""
Road geometry and relay-chain decomposition.

Vehicles sit on a straight road (0, L]. The RSU↔source distance L_a is covered by a
nearest-neighbour chain over equidistant vehicles: k = ceil(L_a·ρ) hops of length 1/ρ
(homogeneous mode), or k − 1 full hops plus a shorter residual hop (residual mode).
Density is in vehicles per metre.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum

import numpy as np

from fogcell.exceptions import InvalidParameterError
from fogcell.rng import ROAD_PLACEMENT, stream

CEIL_TOLERANCE = 1e-9


class Placement(str, Enum):
    EQUIDISTANT = "equidistant"
    POISSON = "poisson"


class HopMode(str, Enum):
    HOMOGENEOUS = "homogeneous"
    RESIDUAL = "residual"


@dataclass(frozen=True)
class RoadTopology:
    """A road segment populated at density ρ."""

    length_m: float
    density_veh_per_m: float
    placement: Placement = Placement.EQUIDISTANT
    seed: int = 0

    def __post_init__(self):
        if not self.length_m > 0:
            raise InvalidParameterError("length_m", f"must be > 0, got {self.length_m}")
        if not self.density_veh_per_m > 0:
            raise InvalidParameterError(
                "density_veh_per_m", f"must be > 0, got {self.density_veh_per_m}"
            )
        object.__setattr__(self, "placement", Placement(self.placement))

    @property
    def spacing_m(self) -> float:
        return 1.0 / self.density_veh_per_m


@dataclass(frozen=True)
class HopChain:
    """Ordered per-hop distances from the source vehicle to the RSU."""

    hop_lengths_m: tuple[float, ...]

    @property
    def k(self) -> int:
        return len(self.hop_lengths_m)

    @property
    def total_m(self) -> float:
        return math.fsum(self.hop_lengths_m)


def place_vehicles(topology: RoadTopology) -> list[float]:
    """
    Vehicle positions along the road, ascending.

    Equidistant placement puts vehicles at j/ρ for j = 1..floor(L·ρ). Poisson placement
    draws a homogeneous Poisson process of rate ρ on (0, L] from the ``road-placement``
    stream of ``topology.seed``.
    """
    rho = topology.density_veh_per_m
    length = topology.length_m
    if topology.placement is Placement.EQUIDISTANT:
        count = math.floor(length * rho + CEIL_TOLERANCE)
        return [j / rho for j in range(1, count + 1)]

    rng = stream(topology.seed, ROAD_PLACEMENT)
    count = int(rng.poisson(length * rho))
    # Uniform order statistics on (0, L]
    positions = length * (1.0 - rng.random(count))
    return sorted(float(x) for x in positions)


def build_hop_chain(
    l_a_m: float, density_veh_per_m: float, mode: HopMode = HopMode.HOMOGENEOUS
) -> HopChain:
    """
    Decompose the RSU↔vehicle distance into relay hops.

    Args:
        l_a_m: Distance L_a between the source vehicle and the RSU (m)
        density_veh_per_m: Vehicle density ρ
        mode: ``homogeneous`` (k hops of 1/ρ) or ``residual`` (last hop shortened)

    Returns:
        HopChain with k = ceil(L_a·ρ) hops
    """
    if not l_a_m > 0:
        raise InvalidParameterError("l_a_m", f"must be > 0, got {l_a_m}")
    if not density_veh_per_m > 0:
        raise InvalidParameterError(
            "density_veh_per_m", f"must be > 0, got {density_veh_per_m}"
        )
    mode = HopMode(mode)
    spacing = 1.0 / density_veh_per_m
    # Products like 300 * 0.08 can land an ulp above the integer
    k = max(1, math.ceil(l_a_m * density_veh_per_m - CEIL_TOLERANCE))

    if mode is HopMode.HOMOGENEOUS:
        return HopChain(hop_lengths_m=(spacing,) * k)

    last = l_a_m - (k - 1) * spacing
    return HopChain(hop_lengths_m=(spacing,) * (k - 1) + (last,))


def hop_chain_from_positions(positions_m: list[float], l_a_m: float) -> HopChain:
    """
    Relay chain over actual vehicle positions, RSU at x = 0.

    The source is the farthest vehicle with x ≤ L_a; every vehicle between it and the
    RSU relays. Co-located vehicles are collapsed.

    Raises:
        InvalidParameterError: if no vehicle lies in (0, L_a]
    """
    if not l_a_m > 0:
        raise InvalidParameterError("l_a_m", f"must be > 0, got {l_a_m}")
    pts = np.unique(np.asarray([x for x in positions_m if 0 < x <= l_a_m], dtype=float))
    if pts.size == 0:
        raise InvalidParameterError("positions_m", f"no vehicle within (0, {l_a_m}] m")
    hops = np.diff(np.concatenate(([0.0], pts)))[::-1]
    return HopChain(hop_lengths_m=tuple(float(h) for h in hops))
