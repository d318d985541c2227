"""Inequality records and decay-rate fitting."""

from dataclasses import dataclass, field
import math

import numpy as np

TOLERANCE = 1e-12


@dataclass(frozen=True)
class BoundReport:
    """Outcome of one numerical inequality check, lhs <= rhs."""

    label: str
    lhs: float
    rhs: float
    tol: float = TOLERANCE
    saturated: bool = False
    context: dict = field(default_factory=dict)

    @property
    def margin(self):
        return self.rhs - self.lhs

    @property
    def satisfied(self):
        return self.lhs <= self.rhs + self.tol

    def __str__(self):
        state = "ok" if self.satisfied else "VIOLATED"
        sat = " (rhs saturated)" if self.saturated else ""
        return f"{self.label}: lhs={self.lhs:.6e} rhs={self.rhs:.6e} [{state}]{sat}"


def guarded_exp(x):
    """exp(x) that saturates to inf instead of raising; flags the saturation."""
    if x > 709.0:
        return math.inf, True
    return math.exp(x), False


@dataclass(frozen=True)
class DecayFit:
    slope: float
    intercept: float
    residual: float
    n_points: int


def fit_decay_exponent(xs, ys):
    """Least-squares slope of log(y) against log(x), ignoring nonpositive y."""
    xs = np.asarray(xs, dtype=float)
    ys = np.asarray(ys, dtype=float)
    mask = (ys > 0) & (xs > 0) & np.isfinite(ys)
    if mask.sum() < 2:
        return DecayFit(math.nan, math.nan, math.nan, int(mask.sum()))
    lx, ly = np.log(xs[mask]), np.log(ys[mask])
    slope, intercept = np.polyfit(lx, ly, 1)
    resid = float(np.sqrt(np.mean((ly - (slope * lx + intercept)) ** 2)))
    return DecayFit(float(slope), float(intercept), resid, int(mask.sum()))
