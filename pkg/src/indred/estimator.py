"""Direct and two-stage subspace estimators with MERC dimension selection.

The two-stage fit estimates the covariate subspace for a transformed
response by projecting the transformed-response kernel onto the subspace
recovered from the original response before eigen-decomposing it.
"""

from __future__ import annotations

import warnings as _warnings
from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from .errors import DimensionError, ThresholdTooEarly, ThresholdTooLate
from .kernels import (
    DataSet,
    Standardizer,
    fit_standardizer,
    save_kernel_binary,
    sir_kernel,
    slice_response,
    standardize,
)
from .linalg import Subspace, SymMatrix, sym_eigen
from .survival import (
    censored_save_kernel,
    censored_sir_binary_kernel,
    censored_sir_kernel,
)

__all__ = [
    "SdrMethod",
    "FitResult",
    "fit_direct",
    "fit_two_stage",
    "fit_two_stage_merc",
    "merc_select",
    "merc_select_induced",
]

_FULL_KINDS = ("sir", "sir-doubleslice")
_BINARY_KINDS = (
    "sir-binary",
    "save-binary",
    "sir-binary-censored",
    "save-binary-censored",
)
_CENSORED_KINDS = ("sir-doubleslice", "sir-binary-censored", "save-binary-censored")

# MERC floors: absolute for the full-response spectrum, relative to the
# top eigenvalue for the projected spectrum, where trailing eigenvalues
# are numerical zeros of the projection rather than noise estimates
_MERC_FLOOR = 1e-12
_INDUCED_RELATIVE_FLOOR = 1e-2

# a projected kernel this far below the unprojected one signals a
# stage-1 subspace that misses the induced directions
_PROJECTED_KERNEL_FLAG_RATIO = 1e-2


@dataclass(frozen=True, eq=False)
class SdrMethod:
    """A kernel recipe: which moments to use and how the response enters.

    kind selects among full-response SIR variants and binary
    threshold-group variants; censored kinds require status information
    on the data they are fit to.
    """

    kind: str
    h: int = 10
    h0: int = 5
    h1: int = 10
    threshold: float | None = None
    relabel: Callable[[np.ndarray], np.ndarray] | None = None

    def __post_init__(self):
        if self.kind not in _FULL_KINDS + _BINARY_KINDS:
            raise ValueError(f"unknown method kind {self.kind!r}")
        if self.kind in _BINARY_KINDS and self.threshold is None:
            raise ValueError(f"{self.kind} requires a threshold")

    @property
    def uses_full_response(self) -> bool:
        return self.kind in _FULL_KINDS

    @property
    def needs_status(self) -> bool:
        return self.kind in _CENSORED_KINDS

    @classmethod
    def sir(cls, h: int = 10, relabel=None) -> "SdrMethod":
        return cls(kind="sir", h=h, relabel=relabel)

    @classmethod
    def sir_binary(cls, threshold: float) -> "SdrMethod":
        return cls(kind="sir-binary", threshold=threshold)

    @classmethod
    def save_binary(cls, threshold: float) -> "SdrMethod":
        return cls(kind="save-binary", threshold=threshold)

    @classmethod
    def sir_doubleslice(cls, h0: int = 5, h1: int = 10) -> "SdrMethod":
        return cls(kind="sir-doubleslice", h0=h0, h1=h1)

    @classmethod
    def sir_binary_censored(cls, threshold: float) -> "SdrMethod":
        return cls(kind="sir-binary-censored", threshold=threshold)

    @classmethod
    def save_binary_censored(cls, threshold: float) -> "SdrMethod":
        return cls(kind="save-binary-censored", threshold=threshold)


@dataclass(frozen=True, eq=False)
class FitResult:
    """Estimated basis in both scales plus the full decomposed spectrum.

    gamma_hat holds the covariate-scale directions (columns, generally
    not orthonormal); b_hat the orthonormal standardized-scale basis.
    eigenvalues is the complete descending spectrum of the kernel that
    was decomposed, so dimension selection can be rerun afterwards.
    """

    gamma_hat: np.ndarray
    b_hat: Subspace
    eigenvalues: np.ndarray
    diagnostics: dict = field(default_factory=dict)


def _binary_groups(y: np.ndarray, threshold: float) -> np.ndarray:
    below = y <= threshold
    if not below.any():
        raise ThresholdTooEarly(f"threshold {threshold} lies below every response")
    if below.all():
        raise ThresholdTooLate(f"threshold {threshold} lies at or above every response")
    return below.astype(np.int64)


def _compute_kernel(data: DataSet, method: SdrMethod, std: Standardizer):
    """Dispatch to the kernel for this method; returns (kernel, diagnostics)."""
    if method.needs_status and data.status is None:
        raise ValueError(f"{method.kind} requires a DataSet with a status vector")
    if method.kind == "sir":
        y = method.relabel(data.y) if method.relabel is not None else data.y
        sl = slice_response(np.asarray(y, dtype=float), method.h)
        k = sir_kernel(standardize(data, std), sl)
        return k, {"slice_counts": sl.counts, "slice_warnings": list(sl.warnings)}
    if method.kind == "sir-doubleslice":
        k = censored_sir_kernel(data, std, method.h0, method.h1)
        return k, {}
    if method.kind == "sir-binary":
        labels = _binary_groups(data.y, method.threshold)
        sl = slice_response(labels.astype(float), 2)
        k = sir_kernel(standardize(data, std), sl)
        return k, {"slice_counts": sl.counts}
    if method.kind == "save-binary":
        labels = _binary_groups(data.y, method.threshold)
        k = save_kernel_binary(standardize(data, std), labels)
        return k, {"slice_counts": np.bincount(labels, minlength=2)}
    if method.kind == "sir-binary-censored":
        return censored_sir_binary_kernel(data, std, method.threshold), {}
    if method.kind == "save-binary-censored":
        return censored_save_kernel(data, std, method.threshold), {}
    raise ValueError(f"unknown method kind {method.kind!r}")  # unreachable


def fit_direct(
    data: DataSet, method: SdrMethod, d_g: int, std: Standardizer | None = None
) -> FitResult:
    """Estimate d_g directions by decomposing the method's kernel alone."""
    if not 1 <= d_g <= data.p:
        raise DimensionError(f"d_g={d_g} outside 1..{data.p}")
    if std is None:
        std = fit_standardizer(data)
    kernel, kdiag = _compute_kernel(data, method, std)
    pairs = sym_eigen(kernel)
    basis = Subspace(pairs.vectors[:, :d_g])
    gamma = std.sigma_inv_sqrt.values @ basis.basis
    diagnostics = {**kdiag, "warnings": []}
    return FitResult(
        gamma_hat=gamma, b_hat=basis, eigenvalues=pairs.values, diagnostics=diagnostics
    )


def fit_two_stage(
    data: DataSet,
    stage1: SdrMethod,
    stage2: SdrMethod,
    d: int,
    d_g: int,
    std: Standardizer | None = None,
    stage1_basis: Subspace | None = None,
) -> FitResult:
    """Project the stage-2 kernel onto the stage-1 subspace, then decompose.

    Stage 1 recovers a d-dimensional subspace from the untransformed
    response; stage 2 builds the transformed-response kernel, which is
    sandwiched by the stage-1 projector before its d_g leading directions
    are extracted. stage1_basis overrides stage 1 with a caller-supplied
    subspace (mainly for diagnostics and testing).
    """
    if not stage1.uses_full_response:
        raise ValueError(f"stage 1 must use the full response, got {stage1.kind!r}")
    if stage2.uses_full_response:
        raise ValueError(f"stage 2 must use a transformed response, got {stage2.kind!r}")
    if not 1 <= d_g <= d <= data.p:
        raise DimensionError(f"need 1 <= d_g <= d <= p, got d_g={d_g}, d={d}, p={data.p}")
    if std is None:
        std = fit_standardizer(data)

    diagnostics: dict = {"warnings": []}
    if stage1_basis is None:
        k1, d1 = _compute_kernel(data, stage1, std)
        pairs1 = sym_eigen(k1)
        basis = Subspace(pairs1.vectors[:, :d])
        diagnostics["stage1_eigenvalues"] = pairs1.values
        diagnostics.update({f"stage1_{k}": v for k, v in d1.items()})
    else:
        if stage1_basis.ambient_dim != data.p or stage1_basis.dim != d:
            raise DimensionError(
                f"stage1_basis is {stage1_basis.ambient_dim}x{stage1_basis.dim}, "
                f"need {data.p}x{d}"
            )
        basis = stage1_basis
    diagnostics["stage1_basis"] = basis.basis

    k2, d2 = _compute_kernel(data, stage2, std)
    diagnostics.update({f"stage2_{k}": v for k, v in d2.items()})
    pairs2 = sym_eigen(k2)
    diagnostics["stage2_eigenvalues"] = pairs2.values

    projector = basis.projector()
    projected = SymMatrix(projector @ k2.values @ projector)
    pairs = sym_eigen(projected)
    diagnostics["projected_eigenvalues"] = pairs.values
    diagnostics["projected_vectors"] = pairs.vectors

    stage2_top = float(pairs2.values[0]) if pairs2.values.size else 0.0
    if pairs.values[0] < _PROJECTED_KERNEL_FLAG_RATIO * max(stage2_top, 0.0):
        diagnostics["warnings"].append(
            "projected kernel nearly vanishes relative to the stage-2 kernel; "
            "the stage-1 subspace may miss the transformed-response directions"
        )

    basis_g = Subspace(pairs.vectors[:, :d_g])
    gamma = std.sigma_inv_sqrt.values @ basis_g.basis
    return FitResult(
        gamma_hat=gamma, b_hat=basis_g, eigenvalues=pairs.values, diagnostics=diagnostics
    )


def merc_select(eigenvalues, d_star: int) -> int:
    """Pick the dimension maximizing successive eigenvalue ratios.

    Ratios r_i = v_i / v_{i+1} are compared for i = 1..d_star (clamped to
    the number of available ratios); the earliest maximum wins. Values
    are floored at 1e-12 so trailing zeros cannot dominate.
    """
    vals = np.asarray(eigenvalues, dtype=float).ravel()
    if vals.size < 2:
        raise DimensionError("need at least 2 eigenvalues to form a ratio")
    if d_star < 1:
        raise DimensionError(f"d_star must be >= 1, got {d_star}")
    floored = np.maximum(vals, _MERC_FLOOR)
    ratios = floored[:-1] / floored[1:]
    top = min(d_star, ratios.size)
    return int(np.argmax(ratios[:top])) + 1


def merc_select_induced(fit, d_hat: int) -> int:
    """Ratio criterion on the projected spectrum, bounded by d_hat.

    Accepts a FitResult (reads its eigenvalues) or a raw spectrum. The
    floor is relative (1e-2 of the top value): past the stage-1 rank the
    projected eigenvalues are numerical zeros, and an absolute floor
    would let noise-over-noise or signal-over-noise ratios win at the
    range boundary. d_hat < 2 returns 1 with a warning since no ratio
    comparison is possible.
    """
    vals = fit.eigenvalues if isinstance(fit, FitResult) else fit
    vals = np.asarray(vals, dtype=float).ravel()
    if d_hat < 2 or vals.size < 2:
        _warnings.warn(
            "dimension selection for the transformed response needs d_hat >= 2 "
            "and at least two eigenvalues; returning 1",
            RuntimeWarning,
            stacklevel=2,
        )
        return 1
    floor = max(_MERC_FLOOR, _INDUCED_RELATIVE_FLOOR * max(float(vals[0]), 0.0))
    floored = np.maximum(vals, floor)
    ratios = floored[:-1] / floored[1:]
    top = min(d_hat, ratios.size)
    return int(np.argmax(ratios[:top])) + 1


def fit_two_stage_merc(
    data: DataSet,
    stage1: SdrMethod,
    stage2: SdrMethod,
    d_star: int = 5,
    std: Standardizer | None = None,
):
    """Two-stage fit with both dimensions chosen by the ratio criterion.

    Returns (fit, d_hat, d_g_hat). d_hat comes from the stage-1 spectrum
    with cap d_star; d_g_hat from the projected spectrum with cap d_hat.
    """
    if std is None:
        std = fit_standardizer(data)
    k1, _ = _compute_kernel(data, stage1, std)
    d_hat = merc_select(sym_eigen(k1).values, d_star)
    probe = fit_two_stage(data, stage1, stage2, d_hat, min(1, d_hat), std=std)
    with _warnings.catch_warnings():
        if d_hat < 2:
            _warnings.simplefilter("ignore", RuntimeWarning)
        d_g_hat = merc_select_induced(probe, d_hat)
    fit = fit_two_stage(data, stage1, stage2, d_hat, d_g_hat, std=std)
    fit.diagnostics["d_hat"] = d_hat
    fit.diagnostics["d_g_hat"] = d_g_hat
    return fit, d_hat, d_g_hat
