"""Confidence intervals for fogcell Monte-Carlo estimates.

This module provides the normal-approximation intervals reported next to every
Monte-Carlo estimate, and a CI-aware ordering check used when comparing sweeps.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

Z95 = 1.959963984540054


def binomial_ci95_halfwidth(p: float, trials: int) -> float:
    """Normal-approximation 95% half-width of a success fraction."""
    if trials <= 0:
        return 0.0
    return Z95 * math.sqrt(max(p * (1.0 - p), 0.0) / trials)


@dataclass
class RunningMoments:
    """Accumulates sum and sum of squares over sample blocks."""

    count: int = 0
    total: float = 0.0
    total_sq: float = 0.0

    def add_block(self, values: np.ndarray) -> None:
        """Add a block of samples."""
        values = np.asarray(values, dtype=float)
        self.count += int(values.size)
        self.total += float(values.sum())
        self.total_sq += float(np.dot(values, values))

    @property
    def mean(self) -> float:
        return self.total / self.count if self.count > 0 else 0.0

    @property
    def variance(self) -> float:
        """Unbiased sample variance."""
        if self.count < 2:
            return 0.0
        var = (self.total_sq - self.count * self.mean**2) / (self.count - 1)
        return max(var, 0.0)

    @property
    def ci95_halfwidth(self) -> float:
        if self.count < 2:
            return 0.0
        return Z95 * math.sqrt(self.variance / self.count)


def is_non_decreasing_within_ci(means: list[float], halfwidths: list[float]) -> bool:
    """
    Check a sequence of estimates is non-decreasing up to sampling noise.

    A step down is tolerated when the two intervals overlap.

    Args:
        means: Point estimates in order
        halfwidths: Matching 95% half-widths

    Returns:
        True if no step down exceeds the combined half-widths
    """
    for i in range(1, len(means)):
        if means[i] + halfwidths[i] + halfwidths[i - 1] < means[i - 1]:
            return False
    return True
