"""Dense symmetric linear algebra primitives.

Everything downstream (kernel construction, the two-stage estimator, the
Monte Carlo harness) runs on these: a cyclic-Jacobi eigensolver with a
deterministic ordering and sign convention, symmetric inverse square
roots, a Moore-Penrose pseudo-inverse, and the Frobenius distance
between spans of orthonormal bases.

The Jacobi core is JIT-compiled with numba when available; the fallback
runs the identical algorithm in pure Python, so results do not depend on
which path executed.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import DimensionError, InvalidMatrix, NotPositiveDefinite

__all__ = [
    "SymMatrix",
    "EigenPairs",
    "Subspace",
    "sym_eigen",
    "leading_subspace",
    "inv_sqrt",
    "pseudo_inverse",
    "frobenius_span_distance",
]

_JACOBI_MAX_SWEEPS = 100
_JACOBI_TOL_FACTOR = 1e-12
_SPD_EIGENVALUE_FACTOR = 1e-10
_DEFAULT_RANK_TOL = 1e-10
_ORTHONORMALITY_TOL = 1e-10


# ---------------------------------------------------------------------------
# domain types
# ---------------------------------------------------------------------------

@dataclass(frozen=True, eq=False)
class SymMatrix:
    """Real symmetric matrix.

    Construction coerces to float64, rejects non-finite or non-square
    input, and stores the symmetrized form (A + A')/2 so that
    ``values[i, j] == values[j, i]`` holds exactly.
    """

    values: np.ndarray

    def __post_init__(self):
        a = np.asarray(self.values, dtype=float)
        if a.ndim != 2 or a.shape[0] != a.shape[1] or a.shape[0] < 1:
            raise InvalidMatrix(f"expected a square matrix, got shape {a.shape}")
        if not np.isfinite(a).all():
            raise InvalidMatrix("matrix has non-finite entries")
        a = (a + a.T) / 2.0
        a.flags.writeable = False
        object.__setattr__(self, "values", a)

    @property
    def dim(self) -> int:
        return self.values.shape[0]


@dataclass(frozen=True, eq=False)
class EigenPairs:
    """Full spectrum of a symmetric matrix.

    ``values`` sorted non-increasing (ties keep the solver's column
    order); ``vectors`` holds matching orthonormal columns, each with its
    largest-magnitude entry positive.
    """

    values: np.ndarray
    vectors: np.ndarray


@dataclass(frozen=True, eq=False)
class Subspace:
    """Orthonormal basis of a linear subspace of R^p."""

    basis: np.ndarray

    def __post_init__(self):
        b = np.asarray(self.basis, dtype=float)
        if b.ndim == 1:
            b = b[:, None]
        if b.ndim != 2 or b.shape[1] < 1 or b.shape[1] > b.shape[0]:
            raise InvalidMatrix(f"expected a p x d basis with 1 <= d <= p, got shape {b.shape}")
        if not np.isfinite(b).all():
            raise InvalidMatrix("basis has non-finite entries")
        gram = b.T @ b
        if np.abs(gram - np.eye(b.shape[1])).max() > _ORTHONORMALITY_TOL:
            raise InvalidMatrix("basis columns are not orthonormal")
        b = b.copy()
        b.flags.writeable = False
        object.__setattr__(self, "basis", b)

    @property
    def ambient_dim(self) -> int:
        return self.basis.shape[0]

    @property
    def dim(self) -> int:
        return self.basis.shape[1]

    def projector(self) -> np.ndarray:
        return self.basis @ self.basis.T

    @classmethod
    def from_columns(cls, columns: np.ndarray) -> "Subspace":
        """Orthonormalize spanning columns (QR) into a Subspace."""
        c = np.asarray(columns, dtype=float)
        if c.ndim == 1:
            c = c[:, None]
        q, _ = np.linalg.qr(c)
        return cls(q)


# ---------------------------------------------------------------------------
# cyclic Jacobi eigensolver
# ---------------------------------------------------------------------------

def _jacobi_core(a0, max_sweeps, tol_factor):
    """Cyclic Jacobi rotations on a symmetric matrix.

    Sweeps stop once the off-diagonal Frobenius mass drops below
    tol_factor * ||A||_F. Returns (diagonal, rotation matrix).
    """
    a = a0.copy()
    n = a.shape[0]
    v = np.eye(n)
    fro = np.sqrt((a * a).sum())
    tol = tol_factor * fro
    for _ in range(max_sweeps):
        off = 0.0
        for p in range(n - 1):
            for q in range(p + 1, n):
                off += a[p, q] * a[p, q]
        if np.sqrt(2.0 * off) <= tol:
            break
        for p in range(n - 1):
            for q in range(p + 1, n):
                apq = a[p, q]
                if apq == 0.0:
                    continue
                tau = (a[q, q] - a[p, p]) / (2.0 * apq)
                if tau >= 0.0:
                    t = 1.0 / (tau + np.sqrt(1.0 + tau * tau))
                else:
                    t = -1.0 / (-tau + np.sqrt(1.0 + tau * tau))
                c = 1.0 / np.sqrt(1.0 + t * t)
                s = t * c
                app = a[p, p]
                aqq = a[q, q]
                a[p, p] = app - t * apq
                a[q, q] = aqq + t * apq
                a[p, q] = 0.0
                a[q, p] = 0.0
                for i in range(n):
                    if i != p and i != q:
                        aip = a[i, p]
                        aiq = a[i, q]
                        a[i, p] = c * aip - s * aiq
                        a[p, i] = a[i, p]
                        a[i, q] = c * aiq + s * aip
                        a[q, i] = a[i, q]
                for i in range(n):
                    vip = v[i, p]
                    viq = v[i, q]
                    v[i, p] = c * vip - s * viq
                    v[i, q] = c * viq + s * vip
    d = np.empty(n)
    for i in range(n):
        d[i] = a[i, i]
    return d, v


try:
    from numba import njit

    _jacobi = njit(cache=True)(_jacobi_core)
except ImportError:  # pragma: no cover - numba is a declared dependency
    _jacobi = _jacobi_core


def _as_sym(a) -> SymMatrix:
    return a if isinstance(a, SymMatrix) else SymMatrix(np.asarray(a))


# ---------------------------------------------------------------------------
# operations
# ---------------------------------------------------------------------------

def sym_eigen(a: SymMatrix | np.ndarray) -> EigenPairs:
    """Full eigen-decomposition of a symmetric matrix.

    Eigenvalues come back in non-increasing order; exact ties keep the
    Jacobi column order (stable sort). Each eigenvector is scaled so that
    its entry of largest absolute value is positive.
    """
    m = _as_sym(a)
    values, vectors = _jacobi(m.values, _JACOBI_MAX_SWEEPS, _JACOBI_TOL_FACTOR)
    order = np.argsort(-values, kind="stable")
    values = values[order]
    vectors = vectors[:, order]
    p = m.dim
    lead = np.argmax(np.abs(vectors), axis=0)
    signs = np.where(vectors[lead, np.arange(p)] < 0.0, -1.0, 1.0)
    return EigenPairs(values=values, vectors=vectors * signs)


def leading_subspace(a: SymMatrix | np.ndarray, d: int) -> Subspace:
    """Span of the d leading eigenvectors of a symmetric matrix."""
    m = _as_sym(a)
    if not 1 <= d <= m.dim:
        raise DimensionError(f"subspace dimension {d} out of range 1..{m.dim}")
    pairs = sym_eigen(m)
    return Subspace(pairs.vectors[:, :d])


def inv_sqrt(a: SymMatrix | np.ndarray, ridge: float = 0.0) -> SymMatrix:
    """Symmetric inverse square root S with S A S = I.

    ridge, when nonzero, adds ridge * I before inversion. A minimum
    eigenvalue at or below 1e-10 times the maximum raises
    NotPositiveDefinite rather than silently regularizing.
    """
    m = _as_sym(a)
    values = m.values
    if ridge:
        values = values + ridge * np.eye(m.dim)
    pairs = sym_eigen(values)
    lam_max = pairs.values[0]
    lam_min = pairs.values[-1]
    if lam_max <= 0.0 or lam_min <= _SPD_EIGENVALUE_FACTOR * lam_max:
        raise NotPositiveDefinite(
            f"matrix is not positive definite: eigenvalue {lam_min:.3e} "
            f"(max {lam_max:.3e})",
            eigenvalue=float(lam_min),
        )
    root = pairs.vectors @ np.diag(pairs.values**-0.5) @ pairs.vectors.T
    return SymMatrix(root)


def pseudo_inverse(a: SymMatrix | np.ndarray, rank_tol: float = _DEFAULT_RANK_TOL) -> SymMatrix:
    """Moore-Penrose inverse of a symmetric matrix via its spectrum.

    Eigenvalues with |lambda| <= rank_tol * max|lambda| are treated as
    zero and left uninverted.
    """
    m = _as_sym(a)
    pairs = sym_eigen(m)
    cutoff = rank_tol * np.abs(pairs.values).max()
    inverted = np.zeros_like(pairs.values)
    keep = np.abs(pairs.values) > cutoff
    inverted[keep] = 1.0 / pairs.values[keep]
    return SymMatrix(pairs.vectors @ np.diag(inverted) @ pairs.vectors.T)


def frobenius_span_distance(a: Subspace, b: Subspace) -> float:
    """Frobenius norm of the difference of the two span projectors."""
    if a.ambient_dim != b.ambient_dim:
        raise DimensionError(
            f"ambient dimensions differ: {a.ambient_dim} vs {b.ambient_dim}"
        )
    diff = a.projector() - b.projector()
    return float(np.sqrt((diff * diff).sum()))
