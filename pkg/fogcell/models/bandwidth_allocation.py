"""
Bandwidth allocation inside a fog cell.

N vehicles demand B_i ~ U(0, 2·B_ave) of the cell bandwidth B. Throughput is
proportional to allocated bandwidth (equal SNR, no interference), with B worth C Mbps.

- traditional: every vehicle is capped at B_ave and at most floor(B/B_ave) vehicles,
  taken in index order, are served.
- adaptive: unused bandwidth is pooled; the cell carries Min{ΣB_i, B}, scaled down
  proportionally under contention.
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from enum import Enum

import numpy as np
from tqdm import tqdm

from fogcell.confidence import RunningMoments
from fogcell.exceptions import InvalidParameterError
from fogcell.logging import get_logger
from fogcell.models.road_topology import CEIL_TOLERANCE
from fogcell.rng import DEMANDS, block_sizes, stream

logger = get_logger(__name__)


class Scheme(str, Enum):
    TRADITIONAL = "traditional"
    ADAPTIVE = "adaptive"


@dataclass(frozen=True)
class CellCapacity:
    """
    Bandwidth and throughput of a fog cell.

    B is an abstract unit (1 by default); only throughput in Mbps is reported.
    """

    b_total: float = 1.0
    c_total: float = 1000.0
    b_ave: float = 0.033
    c_ave: float = 33.0

    def __post_init__(self):
        for name in ("b_total", "c_total", "b_ave", "c_ave"):
            if not getattr(self, name) > 0:
                raise InvalidParameterError(name, f"must be > 0, got {getattr(self, name)}")
        expected = self.c_total / self.b_total * self.b_ave
        if not math.isclose(self.c_ave, expected, rel_tol=1e-9):
            raise InvalidParameterError(
                "c_ave",
                f"must equal (c_total/b_total)*b_ave = {expected}, got {self.c_ave}",
            )

    @classmethod
    def from_throughput(
        cls, c_total: float = 1000.0, c_ave: float = 33.0, b_total: float = 1.0
    ) -> CellCapacity:
        """Build a capacity from C and C_ave; B_ave follows by proportionality."""
        if not c_total > 0:
            raise InvalidParameterError("c_total", f"must be > 0, got {c_total}")
        return cls(b_total=b_total, c_total=c_total, b_ave=c_ave / c_total * b_total, c_ave=c_ave)

    @property
    def mbps_per_unit(self) -> float:
        return self.c_total / self.b_total

    @property
    def served_slots(self) -> int:
        """floor(B/B_ave): vehicles the traditional scheme can serve."""
        return math.floor(self.c_total / self.c_ave + CEIL_TOLERANCE)


@dataclass(frozen=True)
class DemandProfile:
    n: int
    demands: tuple[float, ...]
    seed: int


@dataclass(frozen=True)
class AllocationOutcome:
    per_vehicle_alloc: tuple[float, ...]
    total_alloc: float
    throughput_mbps: float


@dataclass(frozen=True)
class ThroughputPoint:
    """One row of the throughput-versus-vehicle-count sweep."""

    n: int
    scheme: Scheme
    mean_mbps: float
    ci95_mbps: float
    trials: int
    seed: int


def sample_demands(n: int, capacity: CellCapacity, seed: int) -> DemandProfile:
    """Draw n demands uniformly on [0, 2·B_ave) from the ``demands`` stream."""
    if n < 0:
        raise InvalidParameterError("n", f"must be >= 0, got {n}")
    draws = 2.0 * capacity.b_ave * stream(seed, DEMANDS).random(n)
    return DemandProfile(n=n, demands=tuple(float(d) for d in draws), seed=seed)


def count_below_average(profile: DemandProfile, capacity: CellCapacity) -> int:
    """Number of vehicles demanding less than B_ave (the statistic n)."""
    return sum(1 for d in profile.demands if d < capacity.b_ave)


def allocate_traditional(profile: DemandProfile, capacity: CellCapacity) -> AllocationOutcome:
    """Average allocation: the first floor(B/B_ave) vehicles get min(B_i, B_ave)."""
    served = capacity.served_slots
    alloc = tuple(
        min(d, capacity.b_ave) if i < served else 0.0 for i, d in enumerate(profile.demands)
    )
    total = math.fsum(alloc)
    return AllocationOutcome(
        per_vehicle_alloc=alloc,
        total_alloc=total,
        throughput_mbps=capacity.mbps_per_unit * total,
    )


def allocate_adaptive(profile: DemandProfile, capacity: CellCapacity) -> AllocationOutcome:
    """Pooled allocation carrying Min{ΣB_i, B}, proportional scale-down under contention."""
    requested = math.fsum(profile.demands)
    if requested <= capacity.b_total:
        alloc = tuple(profile.demands)
        total = requested
    else:
        scale = capacity.b_total / requested
        alloc = tuple(d * scale for d in profile.demands)
        total = capacity.b_total
    return AllocationOutcome(
        per_vehicle_alloc=alloc,
        total_alloc=total,
        throughput_mbps=capacity.mbps_per_unit * total,
    )


def demand_block(n: int, capacity: CellCapacity, seed: int, block: int, size: int) -> np.ndarray:
    """
    Demand matrix (size × n) of trial block ``block``.

    Drawn from the stream (seed, ``demands``, n, block), so trial t depends only on
    (seed, n, t). Row i is the demand profile of trial block·MC_BLOCK + i.
    """
    return 2.0 * capacity.b_ave * stream(seed, DEMANDS, n, block).random((size, n))


def _iter_throughput_blocks(n: int, capacity: CellCapacity, trials: int, seed: int):
    """Per-trial throughput of both schemes over the same demand samples."""
    served = capacity.served_slots
    for b, size in enumerate(block_sizes(trials)):
        demands = demand_block(n, capacity, seed, b, size)
        traditional = np.minimum(demands[:, :served], capacity.b_ave).sum(axis=1)
        adaptive = np.minimum(demands.sum(axis=1), capacity.b_total)
        yield {
            Scheme.TRADITIONAL: capacity.mbps_per_unit * traditional,
            Scheme.ADAPTIVE: capacity.mbps_per_unit * adaptive,
        }


def throughput_samples(
    n: int, capacity: CellCapacity, trials: int, seed: int
) -> dict[Scheme, np.ndarray]:
    """Per-trial throughput (Mbps) of both schemes, one entry per demand profile."""
    if trials < 1:
        raise InvalidParameterError("trials", f"must be >= 1, got {trials}")
    blocks = list(_iter_throughput_blocks(n, capacity, trials, seed))
    return {scheme: np.concatenate([blk[scheme] for blk in blocks]) for scheme in Scheme}


def _throughput_moments(
    n: int, capacity: CellCapacity, trials: int, seed: int
) -> dict[Scheme, RunningMoments]:
    moments = {scheme: RunningMoments() for scheme in Scheme}
    for blk in _iter_throughput_blocks(n, capacity, trials, seed):
        for scheme, values in blk.items():
            moments[scheme].add_block(values)
    return moments


def mean_throughput(
    scheme: Scheme, n: int, capacity: CellCapacity, trials: int, seed: int
) -> tuple[float, float]:
    """
    Mean fog-cell throughput of ``scheme`` with n vehicles.

    Returns:
        Tuple of (mean Mbps, normal-approximation 95% half-width Mbps)
    """
    if trials < 1:
        raise InvalidParameterError("trials", f"must be >= 1, got {trials}")
    if n < 0:
        raise InvalidParameterError("n", f"must be >= 0, got {n}")
    stats = _throughput_moments(n, capacity, trials, seed)[Scheme(scheme)]
    return stats.mean, stats.ci95_halfwidth


def sweep_throughput(
    n_max: int,
    capacity: CellCapacity,
    trials: int,
    seed: int,
    workers: int = 1,
    show_progress: bool = False,
) -> list[ThroughputPoint]:
    """
    Throughput of both schemes for n = 1..n_max.

    Rows are ordered by n, traditional before adaptive; both schemes see the same
    demand samples at each n.
    """
    if n_max < 1:
        raise InvalidParameterError("n_max", f"must be >= 1, got {n_max}")
    if trials < 1:
        raise InvalidParameterError("trials", f"must be >= 1, got {trials}")

    def evaluate(n: int) -> list[ThroughputPoint]:
        moments = _throughput_moments(n, capacity, trials, seed)
        return [
            ThroughputPoint(
                n=n,
                scheme=scheme,
                mean_mbps=moments[scheme].mean,
                ci95_mbps=moments[scheme].ci95_halfwidth,
                trials=trials,
                seed=seed,
            )
            for scheme in (Scheme.TRADITIONAL, Scheme.ADAPTIVE)
        ]

    logger.info("Throughput sweep n=1..%d, %d trials per point", n_max, trials)
    with ThreadPoolExecutor(max_workers=max(1, workers)) as pool:
        per_n = list(
            tqdm(
                pool.map(evaluate, range(1, n_max + 1)),
                total=n_max,
                desc="Throughput",
                unit="n",
                disable=not show_progress,
            )
        )
    return [point for points in per_n for point in points]
