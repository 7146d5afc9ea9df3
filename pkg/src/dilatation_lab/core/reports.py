"""Convergence reports: the record type every sweep in the lab produces."""

from __future__ import annotations

import math
from dataclasses import dataclass, field

from dilatation_lab.config import DEFAULTS
from dilatation_lab.core.scales import Scale


def fit_loglog_rate(nus, defects, floor: float = DEFAULTS.defect_floor) -> float:
    """Least-squares slope of log(defect) against log(nu).

    Entries at or below the floor are dropped; with fewer than two usable
    points the sequence is numerically flat and the rate is reported as 0.
    """
    xs, ys = [], []
    for nu, d in zip(nus, defects):
        if d > floor:
            xs.append(math.log(nu))
            ys.append(math.log(d))
    if len(xs) < 2:
        return 0.0
    n = len(xs)
    mx = sum(xs) / n
    my = sum(ys) / n
    sxx = sum((x - mx) ** 2 for x in xs)
    if sxx == 0.0:
        return 0.0
    sxy = sum((x - mx) * (y - my) for x, y in zip(xs, ys))
    return sxy / sxx


def nonincreasing(defects, jitter: float = DEFAULTS.jitter_factor,
                  floor: float = DEFAULTS.defect_floor) -> bool:
    """True if the sequence never grows by more than the jitter factor.

    Values at or below the floor are treated as zero, so roundoff wiggle in
    an exactly-satisfied identity does not fail the check.
    """
    prev = None
    for d in defects:
        d = 0.0 if d <= floor else d
        if prev is not None and d > jitter * max(prev, floor):
            return False
        prev = d
    return True


@dataclass
class ConvergenceReport:
    """Defect-versus-scale record of one sweep.

    eps_grid is strictly decreasing in nu; defect has one entry per grid
    scale; fitted_rate is the log-log slope of defect against nu; verdict is
    the sweep's pass/fail decision; metadata carries model name, seed, the
    quantity swept and any sweep-specific extras.
    """

    eps_grid: list[Scale]
    defect: list[float]
    fitted_rate: float
    verdict: bool
    metadata: dict = field(default_factory=dict)

    def __post_init__(self):
        if len(self.eps_grid) != len(self.defect):
            raise ValueError("defect list must match the scale grid in length")
        nus = [e.nu for e in self.eps_grid]
        if any(b >= a for a, b in zip(nus, nus[1:])):
            raise ValueError("scale grid must be strictly decreasing in nu")

    @property
    def nus(self) -> list[float]:
        return [e.nu for e in self.eps_grid]

    @property
    def final_defect(self) -> float:
        return self.defect[-1]


def make_report(eps_grid, defects, verdict, metadata) -> ConvergenceReport:
    rate = fit_loglog_rate([e.nu for e in eps_grid], defects)
    return ConvergenceReport(list(eps_grid), list(defects), rate, bool(verdict), dict(metadata))
