"""fogcell - fog-cell vehicular network simulator.

Analytical models and a mobility simulation for a road segment served by one RSU:
multi-hop 60 GHz relay delay, traditional versus adaptive bandwidth allocation, and
gateway-vehicle handover.
"""

from fogcell.config import ExperimentConfig, parse_config
from fogcell.exceptions import (
    ConfigError,
    FogCellError,
    InvalidParameterError,
    ModelError,
    NoReachablePointError,
)
from fogcell.models import (
    CellCapacity,
    DelayParams,
    DelayResult,
    HopMode,
    LinkParams,
    Placement,
    RoadTopology,
    Scheme,
    SweepCurve,
    allocate_adaptive,
    allocate_traditional,
    build_hop_chain,
    calibrate,
    expected_delay,
    find_turning_point,
    mean_throughput,
    p_hop_analytic,
    p_hop_monte_carlo,
    place_vehicles,
    sample_demands,
    sweep_density,
)
from fogcell.simulation import FogCellConfig, SimSummary, VehicleState, run, select_gateway, step

__version__ = "0.1.0"

__all__ = [
    # Configuration
    "ExperimentConfig",
    "parse_config",
    # Link and topology
    "LinkParams",
    "p_hop_analytic",
    "p_hop_monte_carlo",
    "RoadTopology",
    "Placement",
    "HopMode",
    "place_vehicles",
    "build_hop_chain",
    # Delay
    "DelayParams",
    "DelayResult",
    "SweepCurve",
    "expected_delay",
    "sweep_density",
    "find_turning_point",
    "calibrate",
    # Bandwidth
    "CellCapacity",
    "Scheme",
    "sample_demands",
    "allocate_traditional",
    "allocate_adaptive",
    "mean_throughput",
    # Simulation
    "FogCellConfig",
    "VehicleState",
    "SimSummary",
    "step",
    "select_gateway",
    "run",
    # Exceptions
    "FogCellError",
    "ConfigError",
    "InvalidParameterError",
    "ModelError",
    "NoReachablePointError",
]
