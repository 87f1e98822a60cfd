"""Simulation of process realizations and finite-sample divergence estimation."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Optional

import numpy as np

from .divergences import DivergenceReport, divergence_report
from .errors import GridMismatch, InsufficientSamples, InvalidConfig, InvalidInput
from .kernels import GramMatrix
from .linalg import SymMatrix

__all__ = [
    "INNOVATIONS",
    "PointSample",
    "PathSample",
    "EmpiricalCov",
    "rng_for",
    "sample_points",
    "sample_paths",
    "empirical_cov",
    "estimate_from_samples",
]

INNOVATIONS = ("gaussian", "uniform")
_SEED_MASK = (1 << 64) - 1


def rng_for(seed: int, *keys: int) -> np.random.Generator:
    """Independent generator for ``(seed, *keys)``.

    Streams for different keys do not depend on the order in which they are
    created, so parallel trials reproduce sequential ones exactly.
    """
    entropy = [int(seed) & _SEED_MASK] + [int(k) & _SEED_MASK for k in keys]
    return np.random.Generator(np.random.PCG64(np.random.SeedSequence(entropy)))


@dataclass(frozen=True, eq=False)
class PointSample:
    d: int
    m: int
    coords: np.ndarray
    seed: Optional[int] = None


def sample_points(d: int, m: int, seed: int, *keys: int) -> PointSample:
    """``m`` i.i.d. uniform sites in ``[0, 1]**d``."""
    if d < 1 or m < 1:
        raise InvalidConfig(f"need d >= 1 and m >= 1, got d={d}, m={m}")
    coords = rng_for(seed, *keys).random((m, d))
    coords.setflags(write=False)
    return PointSample(d, m, coords, seed)


@dataclass(frozen=True, eq=False)
class PathSample:
    """``N`` realizations observed at ``m`` sites: ``Z`` is ``m x N``."""

    points: Optional[np.ndarray]
    Z: np.ndarray
    innovation: str = "gaussian"
    seed: Optional[int] = None

    @property
    def m(self) -> int:
        return self.Z.shape[0]

    @property
    def N(self) -> int:
        return self.Z.shape[1]


def _innovations(rng: np.random.Generator, kind: str, shape) -> np.ndarray:
    if kind == "gaussian":
        return rng.standard_normal(shape)
    if kind == "uniform":
        # Zero mean, unit variance.
        r = np.sqrt(3.0)
        return rng.uniform(-r, r, shape)
    raise InvalidConfig(f"unknown innovation {kind!r}; expected one of {INNOVATIONS}")


def sample_paths(
    g: GramMatrix, N: int, innovation: str = "gaussian", seed: int = 0, *keys: int
) -> PathSample:
    """Draw ``N`` realizations with covariance ``g`` at the Gram sites.

    Columns are ``E diag(sqrt(lambda)) w`` with ``(E, lambda)`` the projected
    eigendecomposition of the Gram matrix and ``w`` a vector of i.i.d.
    zero-mean unit-variance innovations. The eigen factor is used instead of
    a Cholesky factor because Gram matrices are routinely singular to
    working precision.
    """
    if N < 1:
        raise InsufficientSamples(f"need N >= 1 paths, got {N}")
    w = _innovations(rng_for(seed, *keys), innovation, (g.m, N))
    Z = g.path_factor @ w
    Z.setflags(write=False)
    return PathSample(g.points, Z, innovation, seed)


@dataclass(frozen=True, eq=False)
class EmpiricalCov:
    mat: SymMatrix
    N: int


def empirical_cov(z, subtract_mean: bool = False) -> EmpiricalCov:
    """``Z Z^T / N``, or the unbiased centered covariance with ``subtract_mean``."""
    Z = z.Z if isinstance(z, PathSample) else np.asarray(z, dtype=float)
    if Z.ndim != 2:
        raise InvalidInput("data matrix must be 2-D (m x N)")
    N = Z.shape[1]
    if N < 1:
        raise InsufficientSamples("need at least one realization")
    if not np.all(np.isfinite(Z)):
        raise InvalidInput("data matrix has non-finite entries")
    if subtract_mean:
        if N < 2:
            raise InsufficientSamples("mean subtraction needs at least two realizations")
        Zc = Z - Z.mean(axis=1, keepdims=True)
        return EmpiricalCov(SymMatrix(Zc @ Zc.T / (N - 1)), N)
    return EmpiricalCov(SymMatrix(Z @ Z.T / N), N)


def estimate_from_samples(
    z1, z2, eps_list: Iterable[float], subtract_mean: bool = False
) -> DivergenceReport:
    """Divergences between two processes from realizations at shared sites.

    Forms ``K_i = Z_i Z_i^T / N_i``, normalizes by the number of sites and
    returns W2^2, entropic OT, Sinkhorn (per epsilon) and the squared HS
    distance between ``K_1 / m`` and ``K_2 / m``. ``N_1`` and ``N_2`` may
    differ.
    """
    p1 = z1.points if isinstance(z1, PathSample) else None
    p2 = z2.points if isinstance(z2, PathSample) else None
    k1 = empirical_cov(z1, subtract_mean)
    k2 = empirical_cov(z2, subtract_mean)
    m = k1.mat.dim
    if k2.mat.dim != m:
        raise GridMismatch(f"samples observed at {m} and {k2.mat.dim} sites")
    if p1 is not None and p2 is not None and not np.array_equal(p1, p2):
        raise GridMismatch("samples were observed at different sites")
    return divergence_report(k1.mat.entries / m, k2.mat.entries / m, eps_list)
