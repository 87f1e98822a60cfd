"""Closed-form optimal transport quantities between Gaussian measures.

All formulas are evaluated on spectra. For a pair of covariances the work
is one eigendecomposition of each covariance plus one SVD of
``sqrt(C1) @ sqrt(C0)``; every other quantity (exact W2, entropic OT and
Sinkhorn divergence at any number of regularization strengths) is a cheap
function of those three spectra.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Dict, Iterable, Optional

import numpy as np

from .errors import DimMismatch, InvalidEpsilon, InvalidInput, NumericalInconsistency
from .kernels import KernelSpec, _points, kernel_matrix
from .linalg import (
    DEFAULT_POLICY,
    MatrixLike,
    PsdPolicy,
    SymMatrix,
    as_sym,
    eig_sym,
    entropic_map_spectrum,
    psd_spectrum,
)

__all__ = [
    "GaussianParams",
    "EntropicParams",
    "DivergenceReport",
    "w2_squared",
    "entropic_ot",
    "sinkhorn",
    "optimal_plan_cross_cov",
    "g_func",
    "sinkhorn_via_rkhs_representation",
    "hs_distance_sq",
    "hs_norm_sq_estimate",
    "trace_norm",
    "sinkhorn_continuity_bound",
    "divergence_report",
    "CLAMP_TOL",
]

# Round-off allowance for quantities that are nonnegative in exact arithmetic.
CLAMP_TOL = 1e-9


@dataclass(frozen=True, eq=False)
class GaussianParams:
    """``N(mean, cov)``; the mean defaults to zero."""

    cov: SymMatrix
    mean: Optional[np.ndarray] = None

    def __post_init__(self):
        cov = as_sym(self.cov)
        object.__setattr__(self, "cov", cov)
        if self.mean is None:
            mean = np.zeros(cov.dim)
        else:
            mean = np.asarray(self.mean, dtype=float).reshape(-1)
            if mean.shape[0] != cov.dim:
                raise DimMismatch(f"mean has length {mean.shape[0]}, covariance dim is {cov.dim}")
        mean.setflags(write=False)
        object.__setattr__(self, "mean", mean)

    @property
    def dim(self) -> int:
        return self.cov.dim


def _gaussian(g) -> GaussianParams:
    return g if isinstance(g, GaussianParams) else GaussianParams(g)


@dataclass(frozen=True)
class EntropicParams:
    epsilon: float

    def __post_init__(self):
        eps = float(self.epsilon)
        if not np.isfinite(eps) or eps <= 0:
            raise InvalidEpsilon(f"epsilon must be positive and finite, got {self.epsilon}")
        object.__setattr__(self, "epsilon", eps)

    @property
    def c(self) -> float:
        return 4.0 / self.epsilon


def _entropic(p) -> EntropicParams:
    return p if isinstance(p, EntropicParams) else EntropicParams(p)


def eps_key(eps: float) -> str:
    """Canonical string form of an epsilon, used as a JSON key."""
    return repr(float(eps))


@dataclass
class DivergenceReport:
    w2_sq: float
    ot_eps: Dict[float, float] = field(default_factory=dict)
    sinkhorn: Dict[float, float] = field(default_factory=dict)
    hs_sq: float = 0.0

    def to_dict(self) -> dict:
        return {
            "w2_sq": self.w2_sq,
            "ot_eps": {eps_key(e): v for e, v in sorted(self.ot_eps.items())},
            "sinkhorn": {eps_key(e): v for e, v in sorted(self.sinkhorn.items())},
            "hs_sq": self.hs_sq,
        }

    @classmethod
    def from_dict(cls, data: dict) -> "DivergenceReport":
        return cls(
            w2_sq=float(data["w2_sq"]),
            ot_eps={float(k): float(v) for k, v in data["ot_eps"].items()},
            sinkhorn={float(k): float(v) for k, v in data["sinkhorn"].items()},
            hs_sq=float(data["hs_sq"]),
        )


class _Factored:
    """Projected spectrum and square root of one covariance."""

    __slots__ = ("lams", "sqrt", "trace")

    def __init__(self, cov: SymMatrix, policy: PsdPolicy):
        s = psd_spectrum(cov, policy)
        self.lams = s.eigenvalues
        self.sqrt = s.apply(np.sqrt)
        self.trace = float(self.lams.sum())


class _Pair:
    """Spectral data shared by every divergence between two Gaussians."""

    def __init__(self, g0: GaussianParams, g1: GaussianParams, policy: PsdPolicy):
        if g0.dim != g1.dim:
            raise DimMismatch(f"dimension mismatch: {g0.dim} vs {g1.dim}")
        self.f0 = _Factored(g0.cov, policy)
        self.f1 = _Factored(g1.cov, policy)
        # sqrt(C1) sqrt(C0) = P diag(sv) Q^T. The singular values are the
        # square roots of the spectrum of sqrt(C0) C1 sqrt(C0); the polar
        # factor P Q^T is the rotation that best aligns sqrt(C1) with sqrt(C0).
        p, self.sv, qt = np.linalg.svd(self.f1.sqrt @ self.f0.sqrt)
        resid = self.f0.sqrt - self.f1.sqrt @ (p @ qt)
        # Bures term as a sum of squares: equals tr C0 + tr C1 - 2 sum(sv)
        # without the cancellation when C0 and C1 are close.
        self.bures = float(np.sum(resid * resid))
        diff = g0.mean - g1.mean
        self.mean_sq = float(diff @ diff)
        self.scale = max(1.0, self.f0.trace + self.f1.trace + self.mean_sq)

    def w2_sq(self) -> float:
        return self.mean_sq + self.bures

    def ot_eps(self, p: EntropicParams) -> float:
        m = entropic_map_spectrum(self.sv**2, p.c)
        half = 0.5 * p.epsilon
        return (
            self.mean_sq
            + self.f0.trace
            + self.f1.trace
            - half * float(m.sum())
            + half * float(np.log1p(0.5 * m).sum())
        )

    def sinkhorn(self, p: EntropicParams) -> float:
        c = p.c
        val = self.mean_sq + (
            g_func(self.f0.lams**2, c) + g_func(self.f1.lams**2, c) - 2.0 * g_func(self.sv**2, c)
        ) / c
        return _clamp(val, "Sinkhorn divergence", self.scale)


def _clamp(value: float, what: str, scale: float = 1.0) -> float:
    if value >= 0:
        return float(value)
    if value >= -CLAMP_TOL * scale:
        return 0.0
    raise NumericalInconsistency(f"{what} is negative beyond round-off: {value:.3e}")


def w2_squared(g0, g1, policy: PsdPolicy = DEFAULT_POLICY) -> float:
    """Squared 2-Wasserstein distance between two Gaussians.

    ``|m0 - m1|^2 + tr C0 + tr C1 - 2 tr (C0^{1/2} C1 C0^{1/2})^{1/2}``.
    Plain covariance matrices are accepted in place of ``GaussianParams``
    and mean a centered Gaussian.
    """
    return _Pair(_gaussian(g0), _gaussian(g1), policy).w2_sq()


def entropic_ot(g0, g1, p, policy: PsdPolicy = DEFAULT_POLICY) -> float:
    """Entropic-regularized OT cost with squared Euclidean cost.

    The log-determinant is evaluated as a sum over the spectrum, so the
    result is exact for the finite-dimensional case. Unlike the Sinkhorn
    divergence this is not zero for identical inputs.
    """
    return _Pair(_gaussian(g0), _gaussian(g1), policy).ot_eps(_entropic(p))


def sinkhorn(g0, g1, p, policy: PsdPolicy = DEFAULT_POLICY) -> float:
    """Sinkhorn divergence ``OT(g0, g1) - (OT(g0, g0) + OT(g1, g1)) / 2``.

    Computed as ``|m0 - m1|^2 + (G(C0^2) + G(C1^2) - 2 G(C0^{1/2} C1 C0^{1/2})) / c``
    with ``c = 4 / epsilon`` (see :func:`g_func`). Values within round-off
    below zero are returned as 0.

    Raises
    ------
    NumericalInconsistency
        If the result is negative by more than round-off.
    """
    return _Pair(_gaussian(g0), _gaussian(g1), policy).sinkhorn(_entropic(p))


def optimal_plan_cross_cov(g0, g1, p, policy: PsdPolicy = DEFAULT_POLICY) -> np.ndarray:
    """Off-diagonal block of the optimal entropic coupling's covariance.

    ``(2/eps) C0^{1/2} (I + M/2)^{-1} C0^{1/2} C1`` where ``M`` is the
    entropic map of ``C0^{1/2} C1 C0^{1/2}``. The coupling is
    ``N([m0, m1], [[C0, C_XY], [C_XY.T, C1]])``.
    """
    g0, g1, p = _gaussian(g0), _gaussian(g1), _entropic(p)
    if g0.dim != g1.dim:
        raise DimMismatch(f"dimension mismatch: {g0.dim} vs {g1.dim}")
    f0 = _Factored(g0.cov, policy)
    c1 = psd_spectrum(g1.cov, policy).reconstruct()
    s = eig_sym(f0.sqrt @ c1 @ f0.sqrt)
    m = entropic_map_spectrum(np.clip(s.eigenvalues, 0.0, None), p.c)
    resolvent = s.apply(lambda _: 1.0 / (1.0 + 0.5 * m))
    return (2.0 / p.epsilon) * (f0.sqrt @ resolvent @ f0.sqrt @ c1)


def g_func(lams, c: float) -> float:
    """``G(A) = tr M(A) - log det(I + M(A)/2)`` from the spectrum of ``A``.

    ``M(A) = -I + (I + c^2 A)^{1/2}``.
    """
    m = entropic_map_spectrum(lams, c)
    return float((m - np.log1p(0.5 * m)).sum())


def sinkhorn_via_rkhs_representation(
    k1gram: MatrixLike,
    k2gram: MatrixLike,
    m: int,
    p,
    policy: PsdPolicy = DEFAULT_POLICY,
) -> float:
    """Sinkhorn divergence between ``N(0, K1/m)`` and ``N(0, K2/m)`` written
    through the empirical RKHS covariance and cross-covariance operators.

    The self terms use the spectra of ``K_i^2 / m^2`` and the cross term the
    nonzero spectrum of ``K1 K2 / m^2``, realized symmetrically. This is a
    separate evaluation route from :func:`sinkhorn` and agrees with it.
    """
    p = _entropic(p)
    k1, k2 = as_sym(k1gram), as_sym(k2gram)
    if k1.dim != k2.dim:
        raise DimMismatch(f"dimension mismatch: {k1.dim} vs {k2.dim}")
    m = int(m)
    if m < 1:
        raise InvalidInput("m must be a positive integer")
    l1 = psd_spectrum(k1, policy)
    l2 = psd_spectrum(k2, policy)
    self1 = (l1.eigenvalues / m) ** 2
    self2 = (l2.eigenvalues / m) ** 2
    # Eigenvalues of (1/m^2) K1^{1/2} K2 K1^{1/2}.
    r1 = l1.apply(np.sqrt)
    cross = eig_sym(r1 @ l2.reconstruct() @ r1).eigenvalues / (m * m)
    cross = np.clip(cross, 0.0, None)
    c = p.c
    val = (g_func(self1, c) + g_func(self2, c) - 2.0 * g_func(cross, c)) / c
    scale = max(1.0, float(l1.eigenvalues.sum() + l2.eigenvalues.sum()) / m)
    return _clamp(val, "Sinkhorn divergence", scale)


def hs_distance_sq(a, b) -> float:
    """Squared Hilbert-Schmidt (Frobenius) distance."""
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    if a.shape != b.shape:
        raise DimMismatch(f"shape mismatch: {a.shape} vs {b.shape}")
    d = a - b
    return float(np.sum(d * d))


def hs_norm_sq_estimate(k: KernelSpec, X, Y, k2: Optional[KernelSpec] = None) -> float:
    """Monte Carlo estimate ``|K[X, Y]|_F^2 / (m n)`` of ``|C_K|_HS^2``.

    With ``k2`` given, the kernel is ``k - k2`` and the estimate targets
    ``|C_k - C_k2|_HS^2``.
    """
    X = _points(X, k.dim, "X")
    Y = _points(Y, k.dim, "Y")
    kxy = kernel_matrix(k, X, Y)
    if k2 is not None:
        if k2.dim != k.dim:
            raise DimMismatch("kernels act on different dimensions")
        kxy = kxy - kernel_matrix(k2, X, Y)
    return float(np.sum(kxy * kxy)) / (X.shape[0] * Y.shape[0])


def trace_norm(a) -> float:
    """Sum of absolute eigenvalues of a symmetric matrix."""
    return float(np.abs(eig_sym(a).eigenvalues).sum())


def sinkhorn_continuity_bound(a_n, a, b_n, b, epsilon: float) -> float:
    """Perturbation bound on the centered Sinkhorn divergence.

    Upper bound on ``|S(A_n, B_n) - S(A, B)|`` in terms of Hilbert-Schmidt
    norms of the four covariances and the two perturbations.
    """
    eps = _entropic(epsilon).epsilon
    hs = lambda x: float(np.linalg.norm(np.asarray(x, dtype=float)))  # noqa: E731
    an, a_, b_ = hs(a_n), hs(a), hs(b)
    da = hs(np.asarray(a_n, dtype=float) - np.asarray(a, dtype=float))
    db = hs(np.asarray(b_n, dtype=float) - np.asarray(b, dtype=float))
    return (3.0 / eps) * (an + a_ + 2.0 * b_) * da + (3.0 / eps) * (2.0 * an + a_ + b_) * db


def divergence_report(
    c0,
    c1,
    eps_list: Iterable[float],
    mean0=None,
    mean1=None,
    policy: PsdPolicy = DEFAULT_POLICY,
) -> DivergenceReport:
    """W2^2, entropic OT and Sinkhorn (per epsilon) and squared HS distance.

    The two covariances are factored once and shared across all epsilons.
    """
    g0 = GaussianParams(as_sym(c0), mean0)
    g1 = GaussianParams(as_sym(c1), mean1)
    pair = _Pair(g0, g1, policy)
    params = [_entropic(e) for e in eps_list]
    return DivergenceReport(
        w2_sq=pair.w2_sq(),
        ot_eps={p.epsilon: pair.ot_eps(p) for p in params},
        sinkhorn={p.epsilon: pair.sinkhorn(p) for p in params},
        hs_sq=hs_distance_sq(g0.cov.entries, g1.cov.entries),
    )
