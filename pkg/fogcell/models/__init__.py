from .bandwidth_allocation import (
    AllocationOutcome,
    CellCapacity,
    DemandProfile,
    Scheme,
    ThroughputPoint,
    allocate_adaptive,
    allocate_traditional,
    count_below_average,
    demand_block,
    mean_throughput,
    sample_demands,
    sweep_throughput,
    throughput_samples,
)
from .delay_model import (
    CalibrationResult,
    DelayParams,
    DelayResult,
    SweepCurve,
    SweepPoint,
    calibrate,
    delay_for_chain,
    delay_lower_bound,
    expected_delay,
    expected_delay_over_positions,
    find_turning_point,
    inclusive_grid,
    sweep_density,
)
from .mmwave_link import (
    LinkParams,
    link_margin_db,
    max_reliable_distance,
    noise_floor_dbm,
    p_hop_analytic,
    p_hop_array,
    p_hop_monte_carlo,
    path_loss_mean_db,
    success_threshold_db,
)
from .road_topology import (
    HopChain,
    HopMode,
    Placement,
    RoadTopology,
    build_hop_chain,
    hop_chain_from_positions,
    place_vehicles,
)

__all__ = [
    "LinkParams",
    "noise_floor_dbm",
    "path_loss_mean_db",
    "success_threshold_db",
    "link_margin_db",
    "p_hop_analytic",
    "p_hop_array",
    "p_hop_monte_carlo",
    "max_reliable_distance",
    "RoadTopology",
    "HopChain",
    "HopMode",
    "Placement",
    "place_vehicles",
    "build_hop_chain",
    "hop_chain_from_positions",
    "DelayParams",
    "DelayResult",
    "SweepPoint",
    "SweepCurve",
    "CalibrationResult",
    "inclusive_grid",
    "delay_lower_bound",
    "delay_for_chain",
    "expected_delay",
    "expected_delay_over_positions",
    "sweep_density",
    "find_turning_point",
    "calibrate",
    "CellCapacity",
    "DemandProfile",
    "AllocationOutcome",
    "ThroughputPoint",
    "Scheme",
    "sample_demands",
    "count_below_average",
    "allocate_traditional",
    "allocate_adaptive",
    "throughput_samples",
    "mean_throughput",
    "demand_block",
    "sweep_throughput",
]
