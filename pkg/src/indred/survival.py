"""Censored-data machinery.

Kaplan-Meier product-limit curves, double slicing of (follow-up time,
status) pairs, and the inverse-probability-of-censoring-weighted moment
estimators that feed the censored SIR and SAVE kernels.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import (
    CensoringSupportViolated,
    DimensionError,
    EmptyData,
    ThresholdTooEarly,
    ThresholdTooLate,
)
from .kernels import (
    DataSet,
    SliceAssignment,
    Standardizer,
    _assignment_from_labels,
    _slice_labels,
    sir_kernel,
    standardize,
)
from .linalg import SymMatrix

__all__ = [
    "SurvivalCurve",
    "CensoredMoments",
    "kaplan_meier",
    "double_slice",
    "censored_sir_kernel",
    "censored_save_moments",
    "censored_save_kernel",
    "censored_sir_binary_kernel",
]

# weights 1/S_C explode as S_C -> 0; error out rather than truncate
_MIN_CENSOR_SURVIVAL = 1e-6


# ---------------------------------------------------------------------------
# Kaplan-Meier
# ---------------------------------------------------------------------------

@dataclass(frozen=True, eq=False)
class SurvivalCurve:
    """Right-continuous product-limit step function.

    S(t) = 1 for t before the first jump; ``values[k]`` is the survival
    probability at and after ``jump_times[k]`` until the next jump.
    """

    jump_times: np.ndarray
    values: np.ndarray

    def evaluate(self, t):
        """S(t), right-continuous (jumps at t included)."""
        idx = np.searchsorted(self.jump_times, t, side="right")
        vals = np.concatenate([[1.0], self.values])
        return vals[idx]

    def evaluate_before(self, t):
        """Left limit S(t-) (jumps at t excluded)."""
        idx = np.searchsorted(self.jump_times, t, side="left")
        vals = np.concatenate([[1.0], self.values])
        return vals[idx]


def kaplan_meier(times, events) -> SurvivalCurve:
    """Product-limit estimator of pr(T > t).

    events holds 1 where the time is an observed event, 0 where censored.
    At tied times, events are processed before censorings (both stay in
    the risk set for that time's factor). Flip the event indicator to
    estimate the censoring distribution.

    With no censored observations the values are computed as exact count
    ratios, so the curve equals the empirical survival function bitwise.
    """
    times = np.asarray(times, dtype=float)
    events = np.asarray(events)
    if times.size == 0:
        raise EmptyData("kaplan_meier needs at least one observation")
    if times.shape != events.shape:
        raise ValueError("times and events must have equal length")
    if not np.isin(events, (0, 1)).all():
        raise ValueError("events entries must be 0 or 1")
    if not (np.isfinite(times).all() and (times >= 0).all()):
        raise ValueError("times must be finite and non-negative")

    n = times.shape[0]
    uniq = np.unique(times)
    # counts per distinct time
    d = np.zeros(uniq.size, dtype=np.int64)  # events
    c = np.zeros(uniq.size, dtype=np.int64)  # censorings
    pos = np.searchsorted(uniq, times)
    np.add.at(d, pos, events == 1)
    np.add.at(c, pos, events == 0)

    jump_times = []
    values = []
    at_risk = n
    surv = 1.0
    censored_seen = 0
    for k in range(uniq.size):
        if d[k] > 0:
            if censored_seen == 0:
                # exact telescoped ratio while no censoring has occurred
                surv = (at_risk - d[k]) / n
            else:
                surv = surv * (1.0 - d[k] / at_risk)
            jump_times.append(uniq[k])
            values.append(surv)
        at_risk -= d[k] + c[k]
        censored_seen += c[k]
    return SurvivalCurve(
        jump_times=np.asarray(jump_times, dtype=float),
        values=np.asarray(values, dtype=float),
    )


# ---------------------------------------------------------------------------
# double slicing
# ---------------------------------------------------------------------------

def double_slice(y_star, delta, h0: int, h1: int) -> SliceAssignment:
    """Slice follow-up times separately within censoring strata.

    Censored observations (delta == 0) are sliced with h0, events with
    h1; event-stratum labels are offset past the censored-stratum labels
    so the combined assignment stays disjoint. An empty stratum degrades
    to slicing the other stratum alone, with a warning recorded.
    """
    y_star = np.asarray(y_star, dtype=float)
    delta = np.asarray(delta)
    if y_star.size == 0:
        raise EmptyData("cannot slice an empty response vector")
    if h0 < 1 or h1 < 1:
        raise DimensionError(f"stratum slice counts must be >= 1, got ({h0}, {h1})")
    mask0 = delta == 0
    mask1 = delta == 1
    labels = np.zeros(y_star.shape[0], dtype=np.int64)
    warnings: tuple[str, ...] = ()
    if not mask0.any():
        warnings = ("censored stratum empty; sliced events only",)
        labels = _slice_labels(y_star, h1)
    elif not mask1.any():
        warnings = ("event stratum empty; sliced censored observations only",)
        labels = _slice_labels(y_star, h0)
    else:
        l0 = _slice_labels(y_star[mask0], h0)
        l1 = _slice_labels(y_star[mask1], h1)
        labels[mask0] = l0
        labels[mask1] = l1 + l0.max()
    return _assignment_from_labels(labels, warnings)


def censored_sir_kernel(data: DataSet, std: Standardizer, h0: int, h1: int) -> SymMatrix:
    """SIR kernel on double-sliced (follow-up, status) data."""
    if data.status is None:
        raise ValueError("censored_sir_kernel needs a DataSet with a status vector")
    z = standardize(data, std)
    return sir_kernel(z, double_slice(data.y, data.status, h0, h1))


# ---------------------------------------------------------------------------
# weighted threshold-group moments
# ---------------------------------------------------------------------------

@dataclass(frozen=True, eq=False)
class CensoredMoments:
    """Plug-in moment estimates of X within the threshold groups
    {T > t} (group 0) and {T <= t} (group 1) under random censoring.

    The sigma estimates need not be PSD in finite samples; they are kept
    as computed.
    """

    mu_t0: np.ndarray
    mu_t1: np.ndarray
    sigma_t0: SymMatrix
    sigma_t1: SymMatrix
    threshold: float


def censored_save_moments(
    data: DataSet, t: float, *, censor_weight_inclusive: bool = True
) -> CensoredMoments:
    """Threshold-group means and covariances under censoring.

    Group 0 ({Y* > t}) uses raw group averages for both moments; group 1
    weights each uncensored observation with Y* <= t by
    1 / [(1 - S_Y(t)) S_C(Y*)] with both survival curves Kaplan-Meier.
    Every moment is then consistent under independent censoring.

    censor_weight_inclusive selects whether S_C is read at Y* including
    jumps at that exact time (right-continuous, the default) or as the
    left limit.
    """
    if data.status is None:
        raise ValueError("censored_save_moments needs a DataSet with a status vector")
    y, delta, x = data.y, data.status, data.X
    n = data.n

    s_y = kaplan_meier(y, delta)
    s_c = kaplan_meier(y, 1 - delta)
    sy_t = float(s_y.evaluate(t))

    if sy_t >= 1.0:
        raise ThresholdTooEarly(f"no observed failures at or before t={t}")
    mask0 = y > t
    if not mask0.any():
        raise ThresholdTooLate(f"no observations beyond t={t}")

    x0 = x[mask0]
    mu0 = x0.mean(axis=0)
    sigma0 = x0.T @ x0 / x0.shape[0] - np.outer(mu0, mu0)

    mask1 = (delta == 1) & (y <= t)
    sc_vals = s_c.evaluate(y[mask1]) if censor_weight_inclusive else s_c.evaluate_before(y[mask1])
    bad = sc_vals < _MIN_CENSOR_SURVIVAL
    if bad.any():
        offender = int(np.flatnonzero(mask1)[np.argmax(bad)])
        raise CensoringSupportViolated(
            f"censoring-survival weight at observation {offender} "
            f"(time {y[offender]:.6g}) is below {_MIN_CENSOR_SURVIVAL:g}",
            observation=offender,
        )
    w = 1.0 / ((1.0 - sy_t) * sc_vals)
    x1 = x[mask1]
    mu1 = (x1 * w[:, None]).sum(axis=0) / n
    sigma1 = x1.T @ (x1 * w[:, None]) / n - np.outer(mu1, mu1)

    return CensoredMoments(
        mu_t0=mu0,
        mu_t1=mu1,
        sigma_t0=SymMatrix(sigma0),
        sigma_t1=SymMatrix(sigma1),
        threshold=float(t),
    )


def censored_save_kernel(data: DataSet, std: Standardizer, t: float) -> SymMatrix:
    """Censored binary SAVE kernel.

    Assembles the p x (1+p) block [S(mu1 - mu0) | S(sigma1 - sigma0)S]
    with S the inverse square root of the covariance, and returns KK'.
    """
    m = censored_save_moments(data, t)
    s = std.sigma_inv_sqrt.values
    mean_col = s @ (m.mu_t1 - m.mu_t0)
    cov_block = s @ (m.sigma_t1.values - m.sigma_t0.values) @ s
    block = np.concatenate([mean_col[:, None], cov_block], axis=1)
    return SymMatrix(block @ block.T)


def censored_sir_binary_kernel(data: DataSet, std: Standardizer, t: float) -> SymMatrix:
    """Censored binary SIR kernel: rank-one outer product of the
    standardized weighted mean difference."""
    m = censored_save_moments(data, t)
    v = std.sigma_inv_sqrt.values @ (m.mu_t1 - m.mu_t0)
    return SymMatrix(np.outer(v, v))
