"""
End-to-end transmission delay in a fog cell.

A packet crosses k relay hops to the RSU. Each hop retries every slot until it
succeeds, so a hop costs t_slot / P_hop on average, and every relay vehicle adds a
processing delay:

    T = Σ t_slot / P_hop(δ_i) + (k − 1)·t_retran

In homogeneous mode every hop has length 1/ρ and T = k·t_slot/P_hop(1/ρ) + (k − 1)·t_retran.
A hop with P_hop = 0 makes the whole path unreachable; unreachable points are carried
as such and never as a large sentinel delay.
"""

from __future__ import annotations

import math
from collections.abc import Sequence
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Optional

import numpy as np
from tqdm import tqdm

from fogcell.exceptions import InvalidParameterError, NoReachablePointError
from fogcell.logging import get_logger
from fogcell.models.mmwave_link import LinkParams, p_hop_analytic, p_hop_array
from fogcell.models.road_topology import (
    CEIL_TOLERANCE,
    HopChain,
    HopMode,
    build_hop_chain,
    hop_chain_from_positions,
)

logger = get_logger(__name__)

# Grid points are rounded to this many decimals; smaller steps would merge points.
GRID_DECIMALS = 10
GRID_MIN_STEP = 1e-9


@dataclass(frozen=True)
class DelayParams:
    """Slot and relay-processing times in seconds."""

    t_slot_s: float = 5e-6
    t_retran_s: float = 5e-6

    def __post_init__(self):
        if not self.t_slot_s > 0:
            raise InvalidParameterError("t_slot_s", f"must be > 0, got {self.t_slot_s}")
        if not self.t_retran_s > 0:
            raise InvalidParameterError("t_retran_s", f"must be > 0, got {self.t_retran_s}")


@dataclass(frozen=True)
class DelayResult:
    k: int
    per_hop_p: tuple[float, ...]
    delay_s: Optional[float]
    reachable: bool

    @property
    def delay_ms(self) -> Optional[float]:
        return None if self.delay_s is None else self.delay_s * 1e3


@dataclass(frozen=True)
class SweepPoint:
    rho: float
    result: DelayResult


@dataclass(frozen=True)
class SweepCurve:
    """Delay against vehicle density for one L_a."""

    l_a_m: float
    points: tuple[SweepPoint, ...]

    def __len__(self) -> int:
        return len(self.points)

    @property
    def rhos(self) -> list[float]:
        return [p.rho for p in self.points]

    def to_rows(self) -> list[tuple[float, Optional[float]]]:
        """(rho, delay_s) pairs, None for unreachable points."""
        return [(p.rho, p.result.delay_s) for p in self.points]


@dataclass
class CalibrationResult:
    """Best link offsets found by :func:`calibrate` and their fit."""

    margin_offset_db: float
    sigma_db: float
    link: LinkParams
    targets: list[tuple[float, float]]
    minima_s: list[float]
    residuals: list[float]
    turning_points: list[tuple[float, float]] = field(default_factory=list)

    @property
    def max_abs_residual(self) -> float:
        return max(abs(r) for r in self.residuals)


def inclusive_grid(start: float, stop: float, step: float) -> list[float]:
    """``start, start+step, ..., stop`` with the endpoint kept despite rounding."""
    if not step >= GRID_MIN_STEP:
        raise InvalidParameterError("step", f"must be >= {GRID_MIN_STEP}, got {step}")
    if stop < start:
        raise InvalidParameterError("stop", f"must be >= start ({start}), got {stop}")
    count = math.floor((stop - start) / step + CEIL_TOLERANCE) + 1
    return [round(start + i * step, GRID_DECIMALS) for i in range(count)]


def delay_lower_bound(k: int, dp: DelayParams) -> float:
    """Delay when every hop succeeds at the first slot."""
    return k * dp.t_slot_s + (k - 1) * dp.t_retran_s


def delay_for_chain(chain: HopChain, link: LinkParams, dp: DelayParams) -> DelayResult:
    """Expected delay across an explicit hop chain."""
    per_hop_p = tuple(p_hop_analytic(d, link) for d in chain.hop_lengths_m)
    if any(p == 0.0 for p in per_hop_p):
        return DelayResult(k=chain.k, per_hop_p=per_hop_p, delay_s=None, reachable=False)
    delay = math.fsum(dp.t_slot_s / p for p in per_hop_p) + (chain.k - 1) * dp.t_retran_s
    return DelayResult(k=chain.k, per_hop_p=per_hop_p, delay_s=delay, reachable=True)


def expected_delay(
    l_a_m: float,
    rho: float,
    link: LinkParams,
    dp: DelayParams,
    mode: HopMode = HopMode.HOMOGENEOUS,
) -> DelayResult:
    """
    Expected end-to-end delay of a packet from a vehicle L_a metres from the RSU.

    Args:
        l_a_m: RSU↔vehicle distance (m)
        rho: Vehicle density (veh/m)
        link: mmWave link budget
        dp: Slot and retransmission times
        mode: Hop decomposition, see :func:`build_hop_chain`

    Returns:
        DelayResult; ``reachable`` is False when any hop has P_hop = 0
    """
    chain = build_hop_chain(l_a_m, rho, mode)
    if HopMode(mode) is HopMode.RESIDUAL:
        return delay_for_chain(chain, link, dp)

    k = chain.k
    p = p_hop_analytic(chain.hop_lengths_m[0], link)
    if p == 0.0:
        return DelayResult(k=k, per_hop_p=(p,) * k, delay_s=None, reachable=False)
    delay = k * (dp.t_slot_s / p) + (k - 1) * dp.t_retran_s
    return DelayResult(k=k, per_hop_p=(p,) * k, delay_s=delay, reachable=True)


def expected_delay_over_positions(
    positions_m: Sequence[float], l_a_m: float, link: LinkParams, dp: DelayParams
) -> DelayResult:
    """Expected delay along the relay chain formed by actual vehicle positions."""
    return delay_for_chain(hop_chain_from_positions(list(positions_m), l_a_m), link, dp)


def _check_grid(rho_grid: Sequence[float]) -> None:
    if len(rho_grid) == 0:
        raise InvalidParameterError("rho_grid", "must not be empty")
    for prev, cur in zip(rho_grid, rho_grid[1:]):
        if not cur > prev:
            raise InvalidParameterError("rho_grid", "must be strictly increasing")
    if not rho_grid[0] > 0:
        raise InvalidParameterError("rho_grid", "densities must be > 0")


def sweep_density(
    l_a_m: float,
    rho_grid: Sequence[float],
    link: LinkParams,
    dp: DelayParams,
    mode: HopMode = HopMode.HOMOGENEOUS,
) -> SweepCurve:
    """One :func:`expected_delay` evaluation per density, in grid order."""
    _check_grid(rho_grid)
    points = tuple(
        SweepPoint(rho=float(rho), result=expected_delay(l_a_m, rho, link, dp, mode))
        for rho in rho_grid
    )
    unreachable = sum(1 for p in points if not p.result.reachable)
    if unreachable:
        logger.debug("L_a=%s: %d of %d points unreachable", l_a_m, unreachable, len(points))
    return SweepCurve(l_a_m=l_a_m, points=points)


def find_turning_point(curve: SweepCurve) -> tuple[float, float]:
    """
    Density of minimum delay among reachable points.

    Ties go to the smallest density.

    Raises:
        NoReachablePointError: if no point of the curve is reachable
    """
    best: Optional[tuple[float, float]] = None
    for point in curve.points:
        if not point.result.reachable:
            continue
        if best is None or point.result.delay_s < best[1]:
            best = (point.rho, point.result.delay_s)
    if best is None:
        raise NoReachablePointError(
            f"No reachable point on the delay curve for L_a={curve.l_a_m} m",
            details={"l_a_m": curve.l_a_m, "points": len(curve)},
        )
    return best


def _homogeneous_minimum(
    l_a_m: float, rhos: np.ndarray, link: LinkParams, dp: DelayParams
) -> float:
    """Minimum of the homogeneous delay curve, ``inf`` if nothing is reachable."""
    k = np.maximum(1, np.ceil(l_a_m * rhos - CEIL_TOLERANCE))
    p = p_hop_array(1.0 / rhos, link)
    with np.errstate(divide="ignore"):
        delays = k * (dp.t_slot_s / p) + (k - 1) * dp.t_retran_s
    delays = np.where(p > 0, delays, np.inf)
    return float(delays.min())


def _curve_minimum(
    l_a_m: float,
    rho_grid: Sequence[float],
    link: LinkParams,
    dp: DelayParams,
    mode: HopMode,
) -> float:
    if HopMode(mode) is HopMode.HOMOGENEOUS:
        return _homogeneous_minimum(l_a_m, np.asarray(rho_grid, dtype=float), link, dp)
    try:
        return find_turning_point(sweep_density(l_a_m, rho_grid, link, dp, mode))[1]
    except NoReachablePointError:
        return math.inf


def calibrate(
    targets: Sequence[tuple[float, float]],
    margin_grid: Sequence[float],
    sigma_grid: Sequence[float],
    dp: DelayParams,
    rho_grid: Sequence[float],
    base_link: Optional[LinkParams] = None,
    mode: HopMode = HopMode.HOMOGENEOUS,
    workers: int = 1,
    show_progress: bool = False,
) -> CalibrationResult:
    """
    Fit (P_tx − θ, σ) to target curve minima by exhaustive grid search.

    The grid is scanned row-major (margin offset outer, σ inner); the pair with the
    smallest maximum relative residual wins, the first one on ties.

    Args:
        targets: (L_a in m, minimum delay in s) pairs
        margin_grid: Candidate P_tx − θ values (dB)
        sigma_grid: Candidate shadowing spreads (dB)
        dp: Slot and retransmission times
        rho_grid: Densities over which each curve minimum is taken
        base_link: Supplies θ, N0, W and the range cap (defaults to LinkParams())
        mode: Hop decomposition
        workers: Threads evaluating grid rows; results do not depend on it
        show_progress: Show a progress bar on stderr

    Returns:
        CalibrationResult for the best pair
    """
    if len(targets) == 0:
        raise InvalidParameterError("targets", "must not be empty")
    if len(margin_grid) == 0 or len(sigma_grid) == 0:
        raise InvalidParameterError("grid", "calibration grids must not be empty")
    if any(not sigma >= 0 for sigma in sigma_grid):
        raise InvalidParameterError("sigma_grid", "shadowing spreads must be >= 0")
    _check_grid(rho_grid)
    base = base_link or LinkParams()

    def evaluate_row(offset: float) -> list[float]:
        row = []
        for sigma in sigma_grid:
            link = base.with_margin_offset(offset, sigma)
            worst = 0.0
            for l_a, target in targets:
                minimum = _curve_minimum(l_a, rho_grid, link, dp, mode)
                worst = max(worst, abs(minimum - target) / target)
            row.append(worst)
        return row

    logger.info(
        "Calibrating over %d x %d grid against %d targets",
        len(margin_grid),
        len(sigma_grid),
        len(targets),
    )
    with ThreadPoolExecutor(max_workers=max(1, workers)) as pool:
        rows = list(
            tqdm(
                pool.map(evaluate_row, margin_grid),
                total=len(margin_grid),
                desc="Calibrating",
                unit="row",
                disable=not show_progress,
            )
        )

    best_index: Optional[tuple[int, int]] = None
    best_score = math.inf
    for i, row in enumerate(rows):
        for j, score in enumerate(row):
            if score < best_score:
                best_score = score
                best_index = (i, j)
    if best_index is None:
        raise NoReachablePointError(
            "No calibration grid point makes every target curve reachable",
            details={"targets": list(targets)},
        )

    offset, sigma = margin_grid[best_index[0]], sigma_grid[best_index[1]]
    link = base.with_margin_offset(offset, sigma)
    minima, residuals, turning_points = [], [], []
    for l_a, target in targets:
        rho_star, delay_star = find_turning_point(sweep_density(l_a, rho_grid, link, dp, mode))
        minima.append(delay_star)
        residuals.append((delay_star - target) / target)
        turning_points.append((rho_star, delay_star))

    logger.info(
        "Best fit: P_tx-theta=%.2f dB sigma=%.2f dB max residual=%.4f",
        offset,
        sigma,
        best_score,
    )
    return CalibrationResult(
        margin_offset_db=float(offset),
        sigma_db=float(sigma),
        link=link,
        targets=[(float(l), float(t)) for l, t in targets],
        minima_s=minima,
        residuals=residuals,
        turning_points=turning_points,
    )
