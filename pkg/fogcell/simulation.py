"""
Time-stepped mobility simulation of a fog cell.

Vehicles enter a straight road at x = 0 and drive in +x at a common speed. One
vehicle inside the RSU coverage acts as gateway for the whole cell; it keeps the
role until it leaves coverage or the road, then the rearmost vehicle in coverage is
elected. Gateway elections are compared against the no-fog-cell baseline where
every vehicle associates with the RSU on entering coverage. Every control epoch the
RSUC re-runs the adaptive bandwidth allocation over the vehicles relayed to the
gateway.
"""

from __future__ import annotations

import math
from collections.abc import Iterable
from dataclasses import dataclass, field, replace
from enum import Enum
from typing import Optional

from fogcell.exceptions import InvalidParameterError
from fogcell.logging import get_logger
from fogcell.models.bandwidth_allocation import CellCapacity, allocate_adaptive, sample_demands
from fogcell.models.mmwave_link import LinkParams
from fogcell.models.road_topology import Placement
from fogcell.reporting.csv_report import fmt
from fogcell.rng import FOGSIM_ARRIVALS, FOGSIM_EPOCH, derive_seed, stream

logger = get_logger(__name__)

TIME_TOLERANCE_S = 1e-9


class EventType(str, Enum):
    ARRIVE = "ARRIVE"
    EXIT = "EXIT"
    GATEWAY_ELECT = "GATEWAY_ELECT"
    GATEWAY_DEPART = "GATEWAY_DEPART"
    COVERAGE_ENTER = "COVERAGE_ENTER"
    EPOCH_ALLOC = "EPOCH_ALLOC"


EVENT_COLUMNS = ("t_s", "event", "vehicle_id", "detail")


@dataclass(frozen=True)
class VehicleState:
    id: int
    x_m: float
    v_mps: float


@dataclass(frozen=True)
class FogCellConfig:
    """Inputs of one mobility run."""

    road_len_m: float = 1000.0
    rsu_x_m: float = 500.0
    rsu_radius_m: float = 150.0
    arrival_placement: Placement = Placement.EQUIDISTANT
    arrival_density: float = 0.05
    v_mps: float = 20.0
    dt_s: float = 0.1
    duration_s: float = 200.0
    ctrl_period_s: float = 1.0
    seed: int = 1
    max_arrivals: Optional[int] = None

    def __post_init__(self):
        object.__setattr__(self, "arrival_placement", Placement(self.arrival_placement))
        positive = ("road_len_m", "rsu_radius_m", "arrival_density", "v_mps", "dt_s")
        for name in positive:
            if not getattr(self, name) > 0:
                raise InvalidParameterError(name, f"must be > 0, got {getattr(self, name)}")
        if not 0 <= self.rsu_x_m <= self.road_len_m:
            raise InvalidParameterError(
                "rsu_x_m", f"must lie within [0, {self.road_len_m}], got {self.rsu_x_m}"
            )
        if not self.duration_s >= 0:
            raise InvalidParameterError("duration_s", f"must be >= 0, got {self.duration_s}")
        if not self.ctrl_period_s >= self.dt_s:
            raise InvalidParameterError(
                "ctrl_period_s", f"must be >= dt_s ({self.dt_s}), got {self.ctrl_period_s}"
            )
        if self.max_arrivals is not None and self.max_arrivals < 0:
            raise InvalidParameterError(
                "max_arrivals", f"must be >= 0, got {self.max_arrivals}"
            )

    @property
    def steps(self) -> int:
        return int(round(self.duration_s / self.dt_s))

    @property
    def ctrl_every(self) -> int:
        """Control epoch length in steps."""
        return max(1, int(round(self.ctrl_period_s / self.dt_s)))

    @property
    def arrival_rate_per_s(self) -> float:
        return self.arrival_density * self.v_mps

    def in_coverage(self, x_m: float) -> bool:
        return abs(x_m - self.rsu_x_m) <= self.rsu_radius_m


@dataclass(frozen=True)
class SimEvent:
    t_s: float
    event: EventType
    vehicle_id: Optional[int] = None
    detail: str = ""

    def to_row(self) -> tuple[str, str, str, str]:
        vid = "" if self.vehicle_id is None else str(self.vehicle_id)
        return (fmt(self.t_s), self.event.value, vid, self.detail)


@dataclass
class SimSummary:
    gateway_handover_count: int = 0
    baseline_handover_count: int = 0
    disconnected_time_fraction: float = 1.0
    mean_chain_hops: float = 0.0
    epoch_throughputs: list[float] = field(default_factory=list)
    vehicles_arrived: int = 0
    vehicles_exited: int = 0
    steps: int = 0

    @property
    def mean_epoch_throughput_mbps(self) -> float:
        if not self.epoch_throughputs:
            return 0.0
        return math.fsum(self.epoch_throughputs) / len(self.epoch_throughputs)

    def to_lines(self) -> list[str]:
        """Summary as ``key=value`` lines."""
        return [
            f"gateway_handover_count={self.gateway_handover_count}",
            f"baseline_handover_count={self.baseline_handover_count}",
            f"disconnected_time_fraction={fmt(self.disconnected_time_fraction)}",
            f"mean_chain_hops={fmt(self.mean_chain_hops)}",
            f"mean_epoch_throughput_mbps={fmt(self.mean_epoch_throughput_mbps)}",
            f"epochs={len(self.epoch_throughputs)}",
            "epoch_throughputs_mbps=" + ";".join(fmt(c) for c in self.epoch_throughputs),
            f"vehicles_arrived={self.vehicles_arrived}",
            f"vehicles_exited={self.vehicles_exited}",
            f"steps={self.steps}",
        ]


class ArrivalProcess:
    """
    Vehicles entering the road at x = 0.

    Equidistant arrivals come every (1/ρ)/v seconds starting at t = 0; Poisson
    arrivals have rate ρ·v per second with exponential gaps drawn from the
    ``fogsim-arrivals`` stream. A vehicle whose arrival time a falls inside a step is
    placed at x = v·(t − a) when the step completes.
    """

    def __init__(self, config: FogCellConfig):
        self.config = config
        self.clock_s = 0.0
        self.count = 0
        self._rng = None
        if config.arrival_placement is Placement.POISSON:
            self._rng = stream(config.seed, FOGSIM_ARRIVALS)
            self._next_s = float(self._rng.exponential(1.0 / config.arrival_rate_per_s))
        else:
            self._next_s = 0.0

    def _exhausted(self) -> bool:
        return self.config.max_arrivals is not None and self.count >= self.config.max_arrivals

    def _schedule_next(self) -> None:
        if self._rng is not None:
            self._next_s += float(self._rng.exponential(1.0 / self.config.arrival_rate_per_s))
        else:
            self._next_s = self.count / self.config.arrival_rate_per_s

    def due(self) -> list[VehicleState]:
        """Vehicles whose arrival time has been reached by the clock."""
        arrived = []
        while not self._exhausted() and self._next_s <= self.clock_s + TIME_TOLERANCE_S:
            x = max(0.0, self.config.v_mps * (self.clock_s - self._next_s))
            arrived.append(VehicleState(id=self.count, x_m=x, v_mps=self.config.v_mps))
            self.count += 1
            self._schedule_next()
        return arrived

    def advance(self, dt: float) -> list[VehicleState]:
        self.clock_s += dt
        return self.due()


def _ordered(vehicles: Iterable[VehicleState]) -> list[VehicleState]:
    return sorted(vehicles, key=lambda v: (v.x_m, v.id))


def step(
    vehicles: list[VehicleState],
    config: FogCellConfig,
    dt: float,
    arrivals: Optional[ArrivalProcess] = None,
) -> list[VehicleState]:
    """
    Advance every vehicle by v·dt, drop those past the road end, add arrivals.

    Returns:
        The new vehicle list ordered by position
    """
    if not dt > 0:
        raise InvalidParameterError("dt", f"must be > 0, got {dt}")
    moved = [replace(v, x_m=v.x_m + v.v_mps * dt) for v in vehicles]
    kept = [v for v in moved if v.x_m <= config.road_len_m]
    if arrivals is not None:
        kept.extend(arrivals.advance(dt))
    return _ordered(kept)


def select_gateway(vehicles: list[VehicleState], config: FogCellConfig) -> Optional[int]:
    """Rearmost vehicle in RSU coverage (longest remaining dwell), lowest id on ties."""
    covered = [v for v in vehicles if config.in_coverage(v.x_m)]
    if not covered:
        return None
    return min(covered, key=lambda v: (v.x_m, v.id)).id


def relay_component(
    ordered: list[VehicleState], gateway_id: int, range_max_m: float
) -> tuple[int, int, int]:
    """
    Vehicles reachable from the gateway through gaps within mmWave range.

    Returns:
        (first index, last index, gateway index) into ``ordered``
    """
    gw = next(i for i, v in enumerate(ordered) if v.id == gateway_id)
    lo = gw
    while lo > 0 and ordered[lo].x_m - ordered[lo - 1].x_m <= range_max_m:
        lo -= 1
    hi = gw
    while hi < len(ordered) - 1 and ordered[hi + 1].x_m - ordered[hi].x_m <= range_max_m:
        hi += 1
    return lo, hi, gw


def run(
    config: FogCellConfig, link: LinkParams, capacity: CellCapacity
) -> tuple[list[SimEvent], SimSummary]:
    """
    Simulate the fog cell for ``config.duration_s``.

    Args:
        config: Road, RSU, arrival and timing settings
        link: Supplies the mmWave range used for relay connectivity
        capacity: Cell capacity for the per-epoch adaptive allocation

    Returns:
        Tuple of (event log, summary); both are deterministic per seed
    """
    dt = config.dt_s
    arrivals = ArrivalProcess(config)
    # Nothing enters a run without steps
    vehicles = _ordered(arrivals.due()) if config.steps > 0 else []
    events: list[SimEvent] = [
        SimEvent(0.0, EventType.ARRIVE, v.id, f"x_m={fmt(v.x_m)}")
        for v in sorted(vehicles, key=lambda v: v.id)
    ]
    summary = SimSummary(steps=config.steps, vehicles_arrived=len(vehicles))

    gateway: Optional[int] = None
    covered_before: set[int] = set()
    disconnected_steps = 0
    hop_sum = 0.0
    hop_steps = 0
    epoch = 0

    logger.info(
        "fogsim: %d steps of %.3g s, %s arrivals at %.4g veh/m",
        config.steps,
        dt,
        config.arrival_placement.value,
        config.arrival_density,
    )

    for i in range(config.steps):
        t = i * dt
        if i > 0:
            before = {v.id for v in vehicles}
            vehicles = step(vehicles, config, dt, arrivals)
            after = {v.id for v in vehicles}
            for vid in sorted(before - after):
                events.append(SimEvent(t, EventType.EXIT, vid))
            new = sorted((v for v in vehicles if v.id not in before), key=lambda v: v.id)
            for v in new:
                events.append(SimEvent(t, EventType.ARRIVE, v.id, f"x_m={fmt(v.x_m)}"))
            summary.vehicles_exited += len(before - after)
            summary.vehicles_arrived += len(new)

        covered = {v.id for v in vehicles if config.in_coverage(v.x_m)}
        for vid in sorted(covered - covered_before):
            events.append(SimEvent(t, EventType.COVERAGE_ENTER, vid))
            summary.baseline_handover_count += 1
        covered_before = covered

        if gateway is not None and gateway not in covered:
            on_road = any(v.id == gateway for v in vehicles)
            reason = "left_coverage" if on_road else "exited_road"
            events.append(SimEvent(t, EventType.GATEWAY_DEPART, gateway, reason))
            gateway = None

        if gateway is None:
            gateway = select_gateway(vehicles, config)
            if gateway is not None:
                events.append(SimEvent(t, EventType.GATEWAY_ELECT, gateway))
                summary.gateway_handover_count += 1
                logger.debug("t=%s elected gateway %d", fmt(t), gateway)

        members: list[VehicleState] = []
        if gateway is not None:
            lo, hi, gw = relay_component(vehicles, gateway, link.range_max_m)
            members = vehicles[lo : hi + 1]
            others = len(members) - 1
            if others > 0:
                hops = sum(abs(j - gw) for j in range(lo, hi + 1))
                hop_sum += hops / others
            hop_steps += 1
        if gateway is None or len(members) < len(vehicles):
            disconnected_steps += 1

        if i % config.ctrl_every == 0:
            profile = sample_demands(
                len(members), capacity, derive_seed(config.seed, FOGSIM_EPOCH, epoch)
            )
            outcome = allocate_adaptive(profile, capacity)
            summary.epoch_throughputs.append(outcome.throughput_mbps)
            # An empty cell still closes the epoch, with zero throughput and no log row
            if members:
                events.append(
                    SimEvent(
                        t,
                        EventType.EPOCH_ALLOC,
                        gateway,
                        f"members={len(members)};throughput_mbps={fmt(outcome.throughput_mbps)}",
                    )
                )
            epoch += 1

    if config.steps > 0:
        summary.disconnected_time_fraction = disconnected_steps / config.steps
    summary.mean_chain_hops = hop_sum / hop_steps if hop_steps else 0.0
    logger.info(
        "fogsim done: %d gateway elections vs %d baseline handovers",
        summary.gateway_handover_count,
        summary.baseline_handover_count,
    )
    return events, summary
