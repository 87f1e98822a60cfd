"""Spectral linear algebra for symmetric positive semidefinite matrices.

Every divergence in gpot is a spectral function, so the routines here only
ever use the symmetric eigensolver (``numpy.linalg.eigh``) or singular
values. Products such as ``A @ B`` of two covariance matrices are not
self-adjoint and are never handed to a general eigensolver.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import NamedTuple, Union

import numpy as np

from .errors import DimMismatch, InvalidEpsilon, InvalidInput, InvalidMatrix, NotPsd

__all__ = [
    "SymMatrix",
    "Spectrum",
    "PsdPolicy",
    "DEFAULT_POLICY",
    "as_sym",
    "eig_sym",
    "psd_project",
    "check_psd",
    "psd_sqrt",
    "cross_singular_values",
    "cross_spectrum",
    "entropic_map_spectrum",
]


class SymMatrix:
    """Dense real symmetric matrix.

    The input is symmetrized as ``(a + a.T) / 2`` on construction, which makes
    ``entries[i, j] == entries[j, i]`` hold bit for bit. The stored array is
    read-only.
    """

    __slots__ = ("_entries",)

    def __init__(self, entries):
        a = np.array(entries, dtype=float, copy=True)
        if a.ndim == 0:
            a = a.reshape(1, 1)
        if a.ndim != 2 or a.shape[0] != a.shape[1]:
            raise InvalidMatrix(f"expected a square matrix, got shape {a.shape}")
        if a.shape[0] < 1:
            raise InvalidMatrix("matrix dimension must be at least 1")
        if not np.all(np.isfinite(a)):
            raise InvalidMatrix("matrix has non-finite entries")
        a = 0.5 * (a + a.T)
        a.setflags(write=False)
        self._entries = a

    @property
    def entries(self) -> np.ndarray:
        return self._entries

    @property
    def dim(self) -> int:
        return self._entries.shape[0]

    def __array__(self, dtype=None, copy=None):
        if dtype is None:
            return self._entries
        return self._entries.astype(dtype)

    def __repr__(self):
        return f"SymMatrix(dim={self.dim})"

    def __eq__(self, other):
        if not isinstance(other, SymMatrix):
            return NotImplemented
        return np.array_equal(self._entries, other._entries)

    __hash__ = None


MatrixLike = Union[SymMatrix, np.ndarray, list, float]


def as_sym(a: MatrixLike) -> SymMatrix:
    if isinstance(a, SymMatrix):
        return a
    return SymMatrix(a)


class Spectrum(NamedTuple):
    """Eigenvalues in descending order and the matching orthonormal columns."""

    eigenvalues: np.ndarray
    basis: np.ndarray

    def reconstruct(self) -> np.ndarray:
        return (self.basis * self.eigenvalues) @ self.basis.T

    def apply(self, func) -> np.ndarray:
        """Return ``basis @ diag(func(eigenvalues)) @ basis.T``, symmetrized."""
        out = (self.basis * func(self.eigenvalues)) @ self.basis.T
        return 0.5 * (out + out.T)


@dataclass(frozen=True)
class PsdPolicy:
    """Round-off handling for matrices that should be PSD.

    Eigenvalues below ``max(clip_floor_abs, clip_floor_rel * lambda_max)`` are
    set to zero. A most-negative eigenvalue below
    ``-(neg_tol_rel * lambda_max + clip_floor_abs)`` is treated as genuine
    indefiniteness rather than round-off.
    """

    clip_floor_rel: float = 1e-12
    clip_floor_abs: float = 1e-14
    neg_tol_rel: float = 1e-8

    def __post_init__(self):
        if min(self.clip_floor_rel, self.clip_floor_abs, self.neg_tol_rel) < 0:
            raise InvalidInput("PsdPolicy floors must be nonnegative")


DEFAULT_POLICY = PsdPolicy()


def eig_sym(a: MatrixLike) -> Spectrum:
    """Symmetric eigendecomposition with a reproducible sign convention.

    Eigenvalues are sorted in descending order (stable with respect to the
    LAPACK output order). Each eigenvector is flipped so that its
    largest-magnitude component is positive.
    """
    a = as_sym(a)
    w, v = np.linalg.eigh(a.entries)
    order = np.argsort(-w, kind="stable")
    w = w[order]
    v = v[:, order]
    lead = np.argmax(np.abs(v), axis=0)
    signs = np.sign(v[lead, np.arange(v.shape[1])])
    signs[signs == 0] = 1.0
    return Spectrum(w, v * signs)


def _floor(lams: np.ndarray, policy: PsdPolicy) -> float:
    top = max(float(lams.max()), 0.0) if lams.size else 0.0
    return max(policy.clip_floor_abs, policy.clip_floor_rel * top)


def psd_project(s: Spectrum, policy: PsdPolicy = DEFAULT_POLICY) -> Spectrum:
    lams = np.asarray(s.eigenvalues, dtype=float)
    clipped = np.where(lams < _floor(lams, policy), 0.0, lams)
    return Spectrum(clipped, s.basis)


def check_psd(s: Spectrum, policy: PsdPolicy = DEFAULT_POLICY) -> None:
    lams = s.eigenvalues
    top = max(float(lams.max()), 0.0)
    low = float(lams.min())
    if low < -(policy.neg_tol_rel * top + policy.clip_floor_abs):
        raise NotPsd(
            f"matrix is indefinite: smallest eigenvalue {low:.3e}, largest {top:.3e}"
        )


def psd_spectrum(a: MatrixLike, policy: PsdPolicy = DEFAULT_POLICY) -> Spectrum:
    """Eigendecomposition of a PSD matrix, checked and projected."""
    s = eig_sym(a)
    check_psd(s, policy)
    return psd_project(s, policy)


def psd_sqrt(a: MatrixLike, policy: PsdPolicy = DEFAULT_POLICY) -> SymMatrix:
    """Principal square root of a PSD matrix.

    Raises
    ------
    NotPsd
        If ``a`` has an eigenvalue more negative than round-off allows.
    """
    s = psd_spectrum(a, policy)
    return SymMatrix(s.apply(np.sqrt))


def cross_singular_values(
    a: MatrixLike, b: MatrixLike, policy: PsdPolicy = DEFAULT_POLICY
) -> np.ndarray:
    """Singular values of ``sqrt(b) @ sqrt(a)``, sorted descending.

    These are the square roots of the eigenvalues of
    ``sqrt(a) @ b @ sqrt(a)``. Getting them from an SVD keeps their absolute
    error at machine precision, where taking square roots of computed
    eigenvalues would amplify it to ``sqrt(eps)``.
    """
    a, b = as_sym(a), as_sym(b)
    if a.dim != b.dim:
        raise DimMismatch(f"dimension mismatch: {a.dim} vs {b.dim}")
    ra = psd_sqrt(a, policy).entries
    rb = psd_sqrt(b, policy).entries
    return np.linalg.svd(rb @ ra, compute_uv=False)


def cross_spectrum(
    a: MatrixLike, b: MatrixLike, policy: PsdPolicy = DEFAULT_POLICY
) -> np.ndarray:
    """Eigenvalues of ``sqrt(a) @ b @ sqrt(a)`` in descending order.

    The nonzero part coincides with the nonzero spectrum of ``a @ b`` and is
    symmetric in ``a`` and ``b``. The result has length ``dim`` and is
    nonnegative.
    """
    return cross_singular_values(a, b, policy) ** 2


def entropic_map_spectrum(lams, c: float) -> np.ndarray:
    """Apply ``lambda -> -1 + sqrt(1 + c**2 * lambda)`` elementwise.

    Evaluated as ``c**2 lambda / (1 + sqrt(1 + c**2 lambda))`` so that small
    arguments do not cancel.
    """
    c = float(c)
    if not np.isfinite(c) or c <= 0:
        raise InvalidEpsilon(f"scale c must be positive and finite, got {c}")
    lams = np.asarray(lams, dtype=float)
    if np.any(lams < 0) or not np.all(np.isfinite(lams)):
        raise NotPsd("spectrum must be finite and nonnegative")
    x = (c * c) * lams
    return x / (1.0 + np.sqrt(1.0 + x))
