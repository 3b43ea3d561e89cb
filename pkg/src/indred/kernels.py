"""Complete-data kernel construction.

Standardization to Z-scale, response slicing with a deterministic
tie-merge rule, the sliced-inverse-regression kernel, the binary
sliced-average-variance kernel, and the map back to X-scale directions.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import (
    DimensionError,
    EmptyData,
    GroupTooSmall,
    NotPositiveDefinite,
    TooFewRows,
)
from .linalg import SymMatrix, inv_sqrt, leading_subspace

__all__ = [
    "DataSet",
    "SliceAssignment",
    "Standardizer",
    "fit_standardizer",
    "standardize",
    "slice_response",
    "sir_kernel",
    "save_kernel_binary",
    "kernel_in_x_scale",
]


# ---------------------------------------------------------------------------
# domain types
# ---------------------------------------------------------------------------

@dataclass(frozen=True, eq=False)
class DataSet:
    """Covariate matrix with response and optional censoring status.

    status, when present, holds 1 for an observed event and 0 for a
    censored observation; absent means complete data.
    """

    X: np.ndarray
    y: np.ndarray
    status: np.ndarray | None = None
    names: tuple[str, ...] | None = None

    def __post_init__(self):
        x = np.asarray(self.X, dtype=float)
        y = np.asarray(self.y, dtype=float)
        if x.ndim != 2:
            raise ValueError(f"X must be 2-dimensional, got shape {x.shape}")
        if y.shape != (x.shape[0],):
            raise ValueError(f"y length {y.shape} does not match n={x.shape[0]}")
        if not (np.isfinite(x).all() and np.isfinite(y).all()):
            raise ValueError("DataSet entries must be finite")
        object.__setattr__(self, "X", x)
        object.__setattr__(self, "y", y)
        if self.status is not None:
            s = np.asarray(self.status)
            if s.shape != y.shape:
                raise ValueError("status length does not match n")
            if not np.isin(s, (0, 1)).all():
                raise ValueError("status entries must be 0 or 1")
            object.__setattr__(self, "status", s.astype(np.int64))
        if self.names is not None and len(self.names) != x.shape[1]:
            raise ValueError("names length does not match p")

    @property
    def n(self) -> int:
        return self.X.shape[0]

    @property
    def p(self) -> int:
        return self.X.shape[1]

    @property
    def is_censored(self) -> bool:
        return self.status is not None


@dataclass(frozen=True, eq=False)
class SliceAssignment:
    """Partition of observations into non-empty response slices 1..s."""

    labels: np.ndarray
    s: int
    counts: np.ndarray
    proportions: np.ndarray
    warnings: tuple[str, ...] = ()


@dataclass(frozen=True, eq=False)
class Standardizer:
    """Moment estimates defining the map Z = sigma^{-1/2} (X - mu)."""

    mu_hat: np.ndarray
    sigma_hat: SymMatrix
    sigma_inv_sqrt: SymMatrix

    @classmethod
    def from_moments(cls, mu, sigma, ridge: float = 0.0) -> "Standardizer":
        sig = sigma if isinstance(sigma, SymMatrix) else SymMatrix(np.asarray(sigma))
        return cls(
            mu_hat=np.asarray(mu, dtype=float),
            sigma_hat=sig,
            sigma_inv_sqrt=inv_sqrt(sig, ridge=ridge),
        )

    @classmethod
    def identity(cls, p: int) -> "Standardizer":
        return cls.from_moments(np.zeros(p), np.eye(p))


# ---------------------------------------------------------------------------
# standardization
# ---------------------------------------------------------------------------

def fit_standardizer(data: DataSet, ridge: float = 0.0) -> Standardizer:
    """Column means, 1/n covariance, and its inverse square root.

    Raises NotPositiveDefinite for a degenerate covariance (pass ridge to
    regularize explicitly) and TooFewRows when n <= p + 1.
    """
    mu = data.X.mean(axis=0)
    centered = data.X - mu
    sigma = SymMatrix(centered.T @ centered / data.n)
    try:
        sis = inv_sqrt(sigma, ridge=ridge)
    except NotPositiveDefinite as exc:
        raise NotPositiveDefinite(
            f"{exc}; covariance is degenerate — consider fit_standardizer(..., ridge=eps)",
            eigenvalue=exc.eigenvalue,
        ) from None
    if data.n <= data.p + 1:
        raise TooFewRows(f"need n > p + 1 (= {data.p + 1}), got n = {data.n}")
    return Standardizer(mu_hat=mu, sigma_hat=sigma, sigma_inv_sqrt=sis)


def standardize(data: DataSet, std: Standardizer) -> np.ndarray:
    """Return the n x p matrix of standardized covariates."""
    return (data.X - std.mu_hat) @ std.sigma_inv_sqrt.values


# ---------------------------------------------------------------------------
# slicing
# ---------------------------------------------------------------------------

def _slice_labels(y: np.ndarray, h: int) -> np.ndarray:
    """Assign labels 1..s, s <= h, by sorted order without splitting ties."""
    n = y.shape[0]
    distinct = np.unique(y)
    if distinct.size <= h:
        return np.searchsorted(distinct, y) + 1
    order = np.argsort(y, kind="stable")
    ys = y[order]
    labels_sorted = np.empty(n, dtype=np.int64)
    i = 0
    slice_id = 0
    remaining = h
    while i < n:
        slice_id += 1
        if remaining <= 1:
            j = n
        else:
            j = i + int(np.ceil((n - i) / remaining))
            if j < n:
                boundary = ys[j - 1]
                while j < n and ys[j] == boundary:
                    j += 1
        labels_sorted[i:j] = slice_id
        i = j
        remaining -= 1
    labels = np.empty(n, dtype=np.int64)
    labels[order] = labels_sorted
    return labels


def _assignment_from_labels(labels: np.ndarray, warnings: tuple[str, ...] = ()) -> SliceAssignment:
    s = int(labels.max())
    counts = np.bincount(labels, minlength=s + 1)[1:]
    if (counts == 0).any():
        raise ValueError("internal error: empty slice produced")
    return SliceAssignment(
        labels=labels,
        s=s,
        counts=counts,
        proportions=counts / labels.shape[0],
        warnings=warnings,
    )


def slice_response(y: np.ndarray, h: int) -> SliceAssignment:
    """Equal-count slices of y in sorted order.

    Tied response values always share a slice, so fewer than h slices can
    come back; y with at most h distinct values gets one slice per value.
    """
    y = np.asarray(y, dtype=float)
    if y.size == 0:
        raise EmptyData("cannot slice an empty response vector")
    if h < 2:
        raise DimensionError(f"need at least 2 slices, got h={h}")
    return _assignment_from_labels(_slice_labels(y, h))


# ---------------------------------------------------------------------------
# kernels
# ---------------------------------------------------------------------------

def sir_kernel(z: np.ndarray, slices: SliceAssignment) -> SymMatrix:
    """Weighted outer product of slice means of standardized covariates.

    K = sum_i f_i m_i m_i' with m_i the mean of Z over slice i. PSD with
    rank at most s - 1 when Z is exactly standardized.
    """
    z = np.asarray(z, dtype=float)
    p = z.shape[1]
    sums = np.zeros((slices.s, p))
    np.add.at(sums, slices.labels - 1, z)
    means = sums / slices.counts[:, None]
    weighted = means * slices.proportions[:, None]
    return SymMatrix(weighted.T @ means)


def _group_moments(z: np.ndarray, mask: np.ndarray, which: str):
    group = z[mask]
    if group.shape[0] < 2:
        raise GroupTooSmall(
            f"group {which} has {group.shape[0]} observation(s); need at least 2"
        )
    mean = group.mean(axis=0)
    centered = group - mean
    cov = centered.T @ centered / group.shape[0]
    return mean, cov


def save_kernel_binary(z: np.ndarray, labels: np.ndarray) -> SymMatrix:
    """Binary SAVE kernel from mean and covariance differences.

    Builds the p x (1+p) block [m1 - m0 | C1 - C0] on standardized Z and
    returns its KK' symmetrization.
    """
    z = np.asarray(z, dtype=float)
    labels = np.asarray(labels)
    m0, c0 = _group_moments(z, labels == 0, "0")
    m1, c1 = _group_moments(z, labels == 1, "1")
    block = np.concatenate([(m1 - m0)[:, None], c1 - c0], axis=1)
    return SymMatrix(block @ block.T)


def kernel_in_x_scale(k_z: SymMatrix | np.ndarray, std: Standardizer, d: int) -> np.ndarray:
    """Map the d leading Z-scale kernel eigenvectors to X-scale directions.

    Returns sigma^{-1/2} times the leading basis; columns are generally
    not orthonormal.
    """
    basis = leading_subspace(k_z, d).basis
    return std.sigma_inv_sqrt.values @ basis
