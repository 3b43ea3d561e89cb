"""Seedable data generators for the three benchmark response models.

Families: a conditional-Gamma response on normal covariates, a
lognormal ratio-of-indices response on elliptical covariates, and a
three-segment piecewise-exponential hazard on scaled normal covariates.
All draws flow through an explicitly seeded generator so replications
are reproducible and parallelizable via substreams.
"""

from __future__ import annotations

import hashlib
import json
from dataclasses import dataclass, field, fields, replace
from typing import Mapping

import numpy as np

from .errors import ModelMisconfigured
from .kernels import DataSet
from .linalg import SymMatrix, sym_eigen

__all__ = [
    "ModelSpec",
    "RNG_ALGORITHM",
    "QUANTILE_SEED",
    "make_rng",
    "gen_elliptical_x",
    "gen_covariates",
    "gen_model_gamma",
    "gen_model_lognormal_ratio",
    "gen_model_piecewise_hazard",
    "gen_dataset",
    "response_quantile",
    "clear_quantile_cache",
]

RNG_ALGORITHM = "numpy-pcg64-seedseq"

# dedicated stream for threshold quantiles so they never alias
# replication substreams
QUANTILE_SEED = 742025

_FAMILIES = ("gamma", "lognormal-ratio", "piecewise-hazard")
_X_LAWS = ("normal", "elliptical")

# Censoring-law scales resolved empirically against the stated 25%
# censoring-rate targets. Reading the second Gamma argument as a scale
# gives 8% censoring for the lognormal model and as a rate gives 41%;
# reading it as the mean (scale = mean/shape) lands both models inside
# 25% +- 2%, so that convention is pinned here and asserted in tests.
CENSOR_SCALE_LOGNORMAL = 1.71 / 2.0
CENSOR_SCALE_PIECEWISE = 8.0


def make_rng(seed: int, *path: int) -> np.random.Generator:
    """Deterministic generator; extra path integers select substreams."""
    return np.random.default_rng(np.random.SeedSequence(entropy=seed, spawn_key=path))


def _padded(head, p):
    out = np.zeros(p)
    out[: len(head)] = head
    return tuple(float(v) for v in out)


@dataclass(frozen=True)
class ModelSpec:
    """Complete description of one generative model.

    Covariates follow mu + scaled equicorrelation sigma_a*I + sigma_b*J,
    optionally conjugated by diag(diag_scale), drawn either as normals
    or via the bounded-radius elliptical construction. The censoring
    time, when enabled, is Gamma(censor_shape, scale=censor_scale),
    independent of everything else.
    """

    family: str
    p: int
    mu: tuple = ()
    sigma_a: float = 0.8
    sigma_b: float = 0.2
    diag_scale: tuple = ()
    x_law: str = "normal"
    alpha: tuple = ()
    alpha1: tuple = ()
    alpha2: tuple = ()
    alpha3: tuple = ()
    tau1: float = 0.0
    tau2: float = 0.0
    radius_beta: tuple = (1.8, 0.3)
    censor_shape: float | None = None
    censor_scale: float | None = None

    def __post_init__(self):
        if self.family not in _FAMILIES:
            raise ValueError(f"unknown family {self.family!r}")
        if self.x_law not in _X_LAWS:
            raise ValueError(f"unknown covariate law {self.x_law!r}")
        if self.p < 1:
            raise ValueError("p must be positive")
        object.__setattr__(self, "mu", self._default_len(self.mu, 0.0))
        object.__setattr__(self, "diag_scale", self._default_len(self.diag_scale, 1.0))
        if self.sigma_a <= 0.0 or self.sigma_b < 0.0:
            raise ValueError("need sigma_a > 0 and sigma_b >= 0")
        needed = {"gamma": ("alpha",), "lognormal-ratio": ("alpha1", "alpha2")}.get(
            self.family, ("alpha1", "alpha2", "alpha3")
        )
        for name in needed:
            vec = getattr(self, name)
            if len(vec) != self.p:
                raise ValueError(f"{name} must have length p={self.p}, got {len(vec)}")
        if self.family == "piecewise-hazard" and not self.tau1 < self.tau2:
            raise ValueError("need tau1 < tau2")
        if (self.censor_shape is None) != (self.censor_scale is None):
            raise ValueError("censoring needs both shape and scale (or neither)")
        if self.censor_shape is not None and (
            self.censor_shape <= 0 or self.censor_scale <= 0
        ):
            raise ValueError("censoring shape and scale must be positive")

    def _default_len(self, vec, fill):
        if len(vec) == 0:
            return (fill,) * self.p
        if len(vec) != self.p:
            raise ValueError(f"vector length {len(vec)} != p={self.p}")
        return tuple(float(v) for v in vec)

    @property
    def is_censored(self) -> bool:
        return self.censor_shape is not None

    def sigma(self) -> np.ndarray:
        d = np.asarray(self.diag_scale)
        base = self.sigma_a * np.eye(self.p) + self.sigma_b * np.ones((self.p, self.p))
        return base * np.outer(d, d)

    def to_dict(self) -> dict:
        out = {}
        for f in fields(self):
            v = getattr(self, f.name)
            out[f.name] = list(v) if isinstance(v, tuple) else v
        return out

    @classmethod
    def from_dict(cls, d: Mapping) -> "ModelSpec":
        known = {f.name for f in fields(cls)}
        unknown = set(d) - known
        if unknown:
            raise ValueError(f"unknown ModelSpec keys: {sorted(unknown)}")
        kwargs = {k: tuple(v) if isinstance(v, list) else v for k, v in d.items()}
        return cls(**kwargs)

    def cache_key(self) -> str:
        canon = json.dumps(self.to_dict(), sort_keys=True, separators=(",", ":"))
        return hashlib.sha256(canon.encode()).hexdigest()

    def uncensored(self) -> "ModelSpec":
        return replace(self, censor_shape=None, censor_scale=None)

    @classmethod
    def gamma_default(cls) -> "ModelSpec":
        return cls(family="gamma", p=3, alpha=(1.0, 2.0, 0.0))

    @classmethod
    def lognormal_default(cls, p: int = 10, censored: bool = False) -> "ModelSpec":
        return cls(
            family="lognormal-ratio",
            p=p,
            mu=_padded((0.0, 3.0, 0.0), p),
            x_law="elliptical",
            alpha1=_padded((3.0, 0.9, -1.5), p),
            alpha2=_padded((3.0, 4.5, 6.0), p),
            censor_shape=2.0 if censored else None,
            censor_scale=CENSOR_SCALE_LOGNORMAL if censored else None,
        )

    @classmethod
    def piecewise_default(cls, p: int = 10, censored: bool = False) -> "ModelSpec":
        return cls(
            family="piecewise-hazard",
            p=p,
            mu=(-0.2,) * p,
            diag_scale=(2.0,) + (1.0,) * (p - 1),
            alpha1=_padded((20.0,), p),
            alpha2=_padded((0.0, 15.0), p),
            alpha3=_padded((0.0, 0.0, 10.0), p),
            tau1=float(np.log(2.0)),
            tau2=float(np.log(8.0)),
            censor_shape=1.0 if censored else None,
            censor_scale=CENSOR_SCALE_PIECEWISE if censored else None,
        )


def _sigma_sqrt(sigma: np.ndarray) -> np.ndarray:
    pairs = sym_eigen(SymMatrix(sigma))
    vals = np.maximum(pairs.values, 0.0)
    return (pairs.vectors * np.sqrt(vals)) @ pairs.vectors.T


def gen_elliptical_x(n, p, mu, sigma, rng, radius=None) -> np.ndarray:
    """Rows mu + sigma^{1/2} r u / |u| with u standard normal and
    r Beta(1.8, 0.3); radius overrides r for testing."""
    mu = np.asarray(mu, dtype=float)
    root = _sigma_sqrt(np.asarray(sigma, dtype=float))
    u = rng.standard_normal((n, p))
    norms = np.linalg.norm(u, axis=1)
    if radius is None:
        r = rng.beta(1.8, 0.3, size=n)
    else:
        r = np.broadcast_to(np.asarray(radius, dtype=float), (n,))
    return mu + (u * (r / norms)[:, None]) @ root


def gen_covariates(n: int, spec: ModelSpec, rng) -> np.ndarray:
    sigma = spec.sigma()
    if spec.x_law == "elliptical":
        a, b = spec.radius_beta
        u = rng.standard_normal((n, spec.p))
        norms = np.linalg.norm(u, axis=1)
        r = rng.beta(a, b, size=n)
        return np.asarray(spec.mu) + (u * (r / norms)[:, None]) @ _sigma_sqrt(sigma)
    return np.asarray(spec.mu) + rng.standard_normal((n, spec.p)) @ _sigma_sqrt(sigma)


def _apply_censoring(x, y, spec: ModelSpec, rng) -> DataSet:
    if not spec.is_censored:
        return DataSet(x, y)
    c = rng.gamma(spec.censor_shape, spec.censor_scale, size=y.shape[0])
    status = (y <= c).astype(np.int64)
    return DataSet(x, np.minimum(y, c), status=status)


def _uncensored_gamma(n, spec, rng):
    x = gen_covariates(n, spec, rng)
    shape = 2.0 * np.exp(x @ np.asarray(spec.alpha))
    y = rng.gamma(shape, 0.5)
    return x, y


def _uncensored_lognormal(n, spec, rng, info=None):
    a1 = np.asarray(spec.alpha1)
    a2 = np.asarray(spec.alpha2)
    rows = []
    accepted = 0
    drawn = 0
    rejected = 0
    while accepted < n:
        batch = gen_covariates(n - accepted, spec, rng)
        proj = batch @ a2
        ok = proj > 0.0
        rows.append(batch[ok])
        accepted += int(ok.sum())
        drawn += batch.shape[0]
        rejected = drawn - accepted
        if drawn >= 64 and rejected > 0.5 * drawn:
            raise ModelMisconfigured(
                f"{rejected}/{drawn} draws violated the positive-index "
                "condition; check alpha2 against the covariate law"
            )
    x = np.concatenate(rows, axis=0)
    if info is not None:
        info["rejected"] = rejected
    ratio = x @ a2
    # Noise scale (alpha2'X)^-2 is read as the standard deviation, not the
    # variance: only that reading reproduces the benchmark table this
    # harness targets (the variance reading roughly triples the distances).
    log_y = -(x @ a1) / ratio + rng.standard_normal(n) * ratio**-2.0
    return x, np.exp(log_y)


def _uncensored_piecewise(n, spec, rng):
    x = gen_covariates(n, spec, rng)
    r1 = np.exp(x @ np.asarray(spec.alpha1))
    r2 = np.exp(x @ np.asarray(spec.alpha2))
    r3 = np.exp(x @ np.asarray(spec.alpha3))
    e = rng.exponential(size=n)
    h1 = spec.tau1 * r1
    h2 = h1 + (spec.tau2 - spec.tau1) * r2
    # exact inversion of the piecewise cumulative hazard
    y = np.where(
        e < h1,
        e / r1,
        np.where(e < h2, spec.tau1 + (e - h1) / r2, spec.tau2 + (e - h2) / r3),
    )
    return x, y


def gen_model_gamma(n: int, spec: ModelSpec, rng) -> DataSet:
    """Y | X Gamma with shape 2 exp(alpha'X) and scale 0.5."""
    x, y = _uncensored_gamma(n, spec, rng)
    return _apply_censoring(x, y, spec, rng)


def gen_model_lognormal_ratio(n: int, spec: ModelSpec, rng, info: dict | None = None) -> DataSet:
    """log Y | X normal with mean -alpha1'X/alpha2'X and sd 1/alpha2'X.

    Covariate rows with alpha2'X <= 0 are rejected and redrawn; the
    count lands in info["rejected"] when a dict is passed. Persistent
    rejection (over half of all draws) raises ModelMisconfigured.
    """
    x, y = _uncensored_lognormal(n, spec, rng, info)
    return _apply_censoring(x, y, spec, rng)


def gen_model_piecewise_hazard(n: int, spec: ModelSpec, rng) -> DataSet:
    """Hazard exp(alpha_k'X) on [0,tau1), [tau1,tau2), [tau2,inf)."""
    x, y = _uncensored_piecewise(n, spec, rng)
    return _apply_censoring(x, y, spec, rng)


_GENERATORS = {
    "gamma": gen_model_gamma,
    "lognormal-ratio": gen_model_lognormal_ratio,
    "piecewise-hazard": gen_model_piecewise_hazard,
}

_UNCENSORED = {
    "gamma": _uncensored_gamma,
    "lognormal-ratio": _uncensored_lognormal,
    "piecewise-hazard": _uncensored_piecewise,
}


def gen_dataset(n: int, spec: ModelSpec, rng, info: dict | None = None) -> DataSet:
    """Family-dispatching entry point used by the simulation harness."""
    if spec.family == "lognormal-ratio":
        return gen_model_lognormal_ratio(n, spec, rng, info)
    return _GENERATORS[spec.family](n, spec, rng)


# quantiles of the uncensored response, memoized per spec
_SAMPLE_CACHE: dict[tuple[str, int], np.ndarray] = {}
_QUANTILE_MIN_N = 1_000_000


def clear_quantile_cache() -> None:
    _SAMPLE_CACHE.clear()


def _response_sample(spec: ModelSpec, precision_n: int, rng) -> np.ndarray:
    base = spec.uncensored()
    gen = _UNCENSORED[base.family]
    chunks = []
    left = precision_n
    while left > 0:
        take = min(left, 250_000)
        chunks.append(gen(take, base, rng)[1])
        left -= take
    return np.concatenate(chunks)


def response_quantile(
    spec: ModelSpec, a_percent: float, precision_n: int = _QUANTILE_MIN_N, rng=None
) -> float:
    """Empirical a-percent quantile of the uncensored response law.

    Draws are cached per spec (censoring fields ignored) when the
    dedicated internal seed is used, i.e. when rng is None; passing an
    explicit rng bypasses the cache entirely.
    """
    if not 0.0 < a_percent < 100.0:
        raise ValueError(f"quantile percent must lie in (0, 100), got {a_percent}")
    if precision_n < _QUANTILE_MIN_N:
        raise ValueError(f"precision_n must be at least {_QUANTILE_MIN_N}")
    if rng is None:
        key = (spec.uncensored().cache_key(), int(precision_n))
        if key not in _SAMPLE_CACHE:
            _SAMPLE_CACHE[key] = _response_sample(spec, precision_n, make_rng(QUANTILE_SEED))
        sample = _SAMPLE_CACHE[key]
    else:
        sample = _response_sample(spec, precision_n, rng)
    return float(np.quantile(sample, a_percent / 100.0))
