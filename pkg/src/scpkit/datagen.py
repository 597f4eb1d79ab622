"""Synthetic instance generators.

All Gaussians are drawn by inverse-CDF: Phi^{-1} applied to PCG64 uniforms
(scipy.special.ndtri), so the stream is pinned by the documented uniform
generator rather than by any library's normal-sampling internals.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import NamedTuple

import numpy as np
from scipy.special import ndtri

from .errors import InvalidArgumentError
from .problems import SparseRegressionData, SskpData


def _gaussian(rng: np.random.Generator, shape) -> np.ndarray:
    u = rng.random(size=shape)
    return ndtri(np.clip(u, 1e-300, 1.0 - 1e-16))


def _child_rng(seed: int, *key: int) -> np.random.Generator:
    return np.random.default_rng(np.random.SeedSequence((int(seed),) + tuple(int(k) for k in key)))


@dataclass(frozen=True)
class SparseRegGenSpec:
    N: int
    p: int
    k: int
    sigma: float
    seed: int

    def __post_init__(self):
        if not (1 <= self.k <= self.p) or self.N < 1:
            raise InvalidArgumentError("need N >= 1 and 1 <= k <= p")
        if self.sigma < 0:
            raise InvalidArgumentError("sigma must be nonnegative")


@dataclass(frozen=True)
class SskpGenSpec:
    N: int
    k: int
    seed: int
    c: float = 4.0
    q: float | None = None  # defaults to max(k, 20)

    def __post_init__(self):
        if self.N < 1 or self.k < 1:
            raise InvalidArgumentError("need N >= 1 and k >= 1")


class SparseRegressionInstance(NamedTuple):
    train: SparseRegressionData
    validation: SparseRegressionData
    test: SparseRegressionData
    true_beta: np.ndarray
    true_support: np.ndarray


DEFAULT_GAMMA_GRID = (0.01, 0.1, 1.0, 10.0)


def gamma_scale(X: np.ndarray) -> float:
    """Design-matrix scale used to place the regularization grid."""
    return float(np.sum(X * X)) / X.shape[1]


def gamma_grid(X: np.ndarray, grid=DEFAULT_GAMMA_GRID) -> list:
    s = gamma_scale(X)
    return [g / s for g in grid]


def gen_sparse_regression(spec: SparseRegGenSpec, gamma: float = 1.0) -> SparseRegressionInstance:
    """Three independent splits of size N sharing one k-sparse coefficient vector."""
    rng_beta = _child_rng(spec.seed, 0)
    support = np.sort(rng_beta.choice(spec.p, size=spec.k, replace=False)).astype(np.int64)
    beta = np.zeros(spec.p)
    beta[support] = _gaussian(rng_beta, spec.k)

    def split(idx: int) -> SparseRegressionData:
        rng = _child_rng(spec.seed, 1 + idx)
        X = _gaussian(rng, (spec.N, spec.p))
        noise = spec.sigma * _gaussian(rng, spec.N)
        y = X @ beta + noise
        return SparseRegressionData(X=X, y=y, k=spec.k, gamma=gamma)

    return SparseRegressionInstance(
        train=split(0), validation=split(1), test=split(2),
        true_beta=beta, true_support=support,
    )


def gen_sskp(spec: SskpGenSpec) -> SskpData:
    """Rewards Unif[10,20]; item loads N(mu_i, sigma_i) with Unif[20,30] means
    and Unif[5,15] scales, i.i.d. across scenarios."""
    rng = _child_rng(spec.seed, 0)
    r = rng.uniform(10.0, 20.0, size=spec.k)
    mu = rng.uniform(20.0, 30.0, size=spec.k)
    sd = rng.uniform(5.0, 15.0, size=spec.k)
    W = mu + sd * _gaussian(rng, (spec.N, spec.k))
    q = float(max(spec.k, 20)) if spec.q is None else float(spec.q)
    return SskpData(r=r, W=W, c=float(spec.c), q=q)
