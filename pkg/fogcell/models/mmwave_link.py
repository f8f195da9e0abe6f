"""
60 GHz V2V link budget.

Per-hop success probability of a vehicle relay link under the log-distance path loss
PL(δ) = 69.6 + 20.9·log10(δ) + ξ with zero-mean Gaussian shadowing ξ ~ N(0, σ²).
A hop succeeds when PL ≤ P_tx − θ − N0·W (all in dB), so

    P_hop = P(ξ ≤ margin) = Φ(margin / σ)

with a hard cutoff P_hop = 0 beyond the mmWave range cap. Interference is ignored.
Φ is evaluated with ``scipy.special.ndtr``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy import special

from fogcell.confidence import binomial_ci95_halfwidth
from fogcell.exceptions import InvalidParameterError
from fogcell.logging import get_logger
from fogcell.rng import LINK_SHADOWING, block_sizes, stream

logger = get_logger(__name__)

PL_INTERCEPT_DB = 69.6
PL_SLOPE_DB = 20.9


@dataclass(frozen=True)
class LinkParams:
    """mmWave link budget. Immutable, safe to share between threads."""

    p_tx_dbm: float = 30.0
    theta_db: float = 10.0
    sigma_db: float = 5.8
    n0_dbm_per_hz: float = -174.0
    w_hz: float = 2e9
    range_max_m: float = 50.0

    def __post_init__(self):
        if not self.w_hz > 0:
            raise InvalidParameterError("w_hz", f"bandwidth must be > 0, got {self.w_hz}")
        if not self.range_max_m > 0:
            raise InvalidParameterError(
                "range_max_m", f"range cap must be > 0, got {self.range_max_m}"
            )
        if not self.sigma_db >= 0:
            raise InvalidParameterError("sigma_db", f"must be >= 0, got {self.sigma_db}")

    @property
    def margin_offset_db(self) -> float:
        """P_tx − θ, the only way transmit power and threshold enter P_hop."""
        return self.p_tx_dbm - self.theta_db

    def with_margin_offset(self, offset_db: float, sigma_db: float) -> LinkParams:
        """Copy with P_tx moved so that P_tx − θ = offset_db, θ kept."""
        return LinkParams(
            p_tx_dbm=self.theta_db + offset_db,
            theta_db=self.theta_db,
            sigma_db=sigma_db,
            n0_dbm_per_hz=self.n0_dbm_per_hz,
            w_hz=self.w_hz,
            range_max_m=self.range_max_m,
        )


def _check_distance(delta_m: float) -> None:
    if not delta_m > 0:
        raise InvalidParameterError("delta_m", f"distance must be > 0, got {delta_m}")


def noise_floor_dbm(params: LinkParams) -> float:
    """Thermal noise over the link bandwidth: N0 + 10·log10(W)."""
    if not params.w_hz > 0:
        raise InvalidParameterError("w_hz", f"bandwidth must be > 0, got {params.w_hz}")
    return params.n0_dbm_per_hz + 10.0 * math.log10(params.w_hz)


def path_loss_mean_db(delta_m: float) -> float:
    """Mean path loss (ξ = 0) at distance ``delta_m`` metres."""
    _check_distance(delta_m)
    return PL_INTERCEPT_DB + PL_SLOPE_DB * math.log10(delta_m)


def success_threshold_db(params: LinkParams) -> float:
    """Largest path loss a hop can absorb: P_tx − θ − N0·W."""
    return params.margin_offset_db - noise_floor_dbm(params)


def link_margin_db(delta_m: float, params: LinkParams) -> float:
    """Budget left after mean path loss; P_hop = P(ξ ≤ margin)."""
    return success_threshold_db(params) - path_loss_mean_db(delta_m)


def p_hop_analytic(delta_m: float, params: LinkParams) -> float:
    """
    Success probability of one relay hop.

    Args:
        delta_m: Hop distance in metres (> 0)
        params: Link budget

    Returns:
        0 beyond the range cap; a step function of the margin when σ = 0;
        Φ(margin/σ) otherwise
    """
    _check_distance(delta_m)
    if delta_m > params.range_max_m:
        return 0.0
    margin = link_margin_db(delta_m, params)
    if params.sigma_db == 0:
        return 1.0 if margin >= 0 else 0.0
    return float(special.ndtr(margin / params.sigma_db))


def p_hop_array(deltas_m: np.ndarray, params: LinkParams) -> np.ndarray:
    """Vectorised :func:`p_hop_analytic` over an array of hop distances."""
    deltas = np.asarray(deltas_m, dtype=float)
    if np.any(~(deltas > 0)):
        raise InvalidParameterError("delta_m", "all distances must be > 0")
    margin = success_threshold_db(params) - (PL_INTERCEPT_DB + PL_SLOPE_DB * np.log10(deltas))
    if params.sigma_db == 0:
        p = np.where(margin >= 0, 1.0, 0.0)
    else:
        p = special.ndtr(margin / params.sigma_db)
    return np.where(deltas > params.range_max_m, 0.0, p)


def p_hop_monte_carlo(
    delta_m: float, params: LinkParams, trials: int, seed: int
) -> tuple[float, float]:
    """
    Monte-Carlo estimate of P_hop from sampled shadowing.

    Trials are drawn in blocks from the ``link-shadowing`` stream, so the estimate is a
    pure function of (seed, trials).

    Returns:
        Tuple of (success fraction, normal-approximation 95% half-width)
    """
    if trials < 1:
        raise InvalidParameterError("trials", f"must be >= 1, got {trials}")
    _check_distance(delta_m)
    if delta_m > params.range_max_m:
        return 0.0, 0.0

    threshold = success_threshold_db(params)
    mean_pl = path_loss_mean_db(delta_m)
    successes = 0
    for b, size in enumerate(block_sizes(trials)):
        xi = params.sigma_db * stream(seed, LINK_SHADOWING, b).standard_normal(size)
        successes += int(np.count_nonzero(mean_pl + xi <= threshold))

    estimate = successes / trials
    logger.debug("p_hop_monte_carlo delta=%s trials=%d estimate=%.6f", delta_m, trials, estimate)
    return estimate, binomial_ci95_halfwidth(estimate, trials)


def max_reliable_distance(params: LinkParams, p_target: float) -> float:
    """
    Longest hop that still reaches ``p_target`` success probability.

    Inverts the margin with ``scipy.special.ndtri``; the result is capped at the range
    limit. With σ = 0 every hop with a non-negative margin qualifies.
    """
    if not 0 < p_target < 1:
        raise InvalidParameterError("p_target", f"must lie in (0, 1), got {p_target}")
    required_margin = params.sigma_db * float(special.ndtri(p_target))
    exponent = (success_threshold_db(params) - required_margin - PL_INTERCEPT_DB) / PL_SLOPE_DB
    return min(10.0**exponent, params.range_max_m)
