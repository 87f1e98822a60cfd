"""Positive definite kernels on the unit cube and their Gram matrices."""

from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property
from math import comb
from typing import Optional

import numpy as np
from scipy.spatial.distance import cdist

from .errors import DimMismatch, EmptyInput, InvalidConfig, InvalidInput
from .linalg import SymMatrix, psd_spectrum

__all__ = [
    "KernelSpec",
    "GramMatrix",
    "kernel_eval",
    "kernel_matrix",
    "gram",
    "cross_gram",
    "kernel_sup_bound",
    "rkhs_dim",
]

KINDS = ("se", "exp", "poly")


@dataclass(frozen=True)
class KernelSpec:
    """A kernel on ``[0, 1]**dim``.

    ``kind`` is one of

    * ``"se"``: ``exp(-|x - y|**2 / param**2)`` (``param`` is sigma)
    * ``"exp"``: ``exp(-param * |x - y|)`` (``param`` is a)
    * ``"poly"``: ``<x, y>**degree``, no offset term
    """

    kind: str
    dim: int = 1
    param: Optional[float] = None
    degree: Optional[int] = None

    def __post_init__(self):
        if self.kind not in KINDS:
            raise InvalidConfig(f"unknown kernel kind {self.kind!r}; expected one of {KINDS}")
        if int(self.dim) != self.dim or self.dim < 1:
            raise InvalidConfig(f"kernel dim must be a positive integer, got {self.dim}")
        if self.kind == "poly":
            if self.degree is None or int(self.degree) != self.degree or self.degree < 1:
                raise InvalidConfig("polynomial kernel needs an integer degree >= 1")
        else:
            if self.param is None or not np.isfinite(self.param) or self.param <= 0:
                raise InvalidConfig(f"{self.kind} kernel needs a positive param")

    @classmethod
    def squared_exponential(cls, sigma: float, dim: int = 1) -> "KernelSpec":
        return cls("se", dim, param=float(sigma))

    @classmethod
    def exponential(cls, a: float, dim: int = 1) -> "KernelSpec":
        return cls("exp", dim, param=float(a))

    @classmethod
    def polynomial(cls, degree: int, dim: int = 1) -> "KernelSpec":
        return cls("poly", dim, degree=int(degree))

    def to_dict(self) -> dict:
        out = {"kind": self.kind, "dim": self.dim}
        if self.kind == "poly":
            out["degree"] = self.degree
        else:
            out["param"] = self.param
        return out

    @classmethod
    def from_dict(cls, data: dict, dim: Optional[int] = None) -> "KernelSpec":
        try:
            kind = data["kind"]
        except (KeyError, TypeError):
            raise InvalidConfig(f"kernel description needs a 'kind': {data!r}") from None
        d = data.get("dim", dim if dim is not None else 1)
        if dim is not None and d != dim:
            raise InvalidConfig(f"kernel dim {d} disagrees with config dim {dim}")
        param = data.get("param")
        degree = data.get("degree")
        return cls(
            kind,
            int(d),
            param=None if param is None else float(param),
            degree=None if degree is None else int(degree),
        )


def _points(X, dim: int, name: str = "X") -> np.ndarray:
    X = np.asarray(X, dtype=float)
    if X.ndim == 1:
        X = X.reshape(-1, dim) if dim > 1 else X.reshape(-1, 1)
    if X.ndim != 2:
        raise InvalidInput(f"{name} must be a 2-D array of points")
    if X.shape[0] == 0:
        raise EmptyInput(f"{name} has no points")
    if X.shape[1] != dim:
        raise DimMismatch(f"{name} has {X.shape[1]} columns, kernel dim is {dim}")
    if not np.all(np.isfinite(X)):
        raise InvalidInput(f"{name} has non-finite coordinates")
    if X.min() < 0.0 or X.max() > 1.0:
        raise InvalidInput(f"{name} has coordinates outside [0, 1]")
    return X


def kernel_matrix(k: KernelSpec, X, Y) -> np.ndarray:
    """Matrix of ``k(x_i, y_j)`` for validated point arrays."""
    if k.kind == "se":
        return np.exp(-cdist(X, Y, "sqeuclidean") / (k.param * k.param))
    if k.kind == "exp":
        return np.exp(-k.param * cdist(X, Y, "euclidean"))
    return (X @ Y.T) ** k.degree


def kernel_eval(k: KernelSpec, x, y) -> float:
    x = np.asarray(x, dtype=float).reshape(-1)
    y = np.asarray(y, dtype=float).reshape(-1)
    if x.shape[0] != k.dim or y.shape[0] != k.dim:
        raise DimMismatch(
            f"points have lengths {x.shape[0]} and {y.shape[0]}, kernel dim is {k.dim}"
        )
    if not (np.all(np.isfinite(x)) and np.all(np.isfinite(y))):
        raise InvalidInput("points must be finite")
    return float(kernel_matrix(k, x[None, :], y[None, :])[0, 0])


@dataclass(frozen=True, eq=False)
class GramMatrix:
    base: SymMatrix
    kernel: KernelSpec
    points: np.ndarray

    @property
    def m(self) -> int:
        return self.base.dim

    @cached_property
    def path_factor(self) -> np.ndarray:
        """``E diag(sqrt(lambda))`` from the projected eigendecomposition."""
        s = psd_spectrum(self.base)
        return s.basis * np.sqrt(s.eigenvalues)


def gram(k: KernelSpec, X) -> GramMatrix:
    """Gram matrix ``K[X]`` with entries ``k(x_i, x_j)``."""
    X = _points(X, k.dim)
    X = X.copy()
    X.setflags(write=False)
    return GramMatrix(SymMatrix(kernel_matrix(k, X, X)), k, X)


def cross_gram(k: KernelSpec, X, Y) -> np.ndarray:
    """Rectangular matrix ``K[X, Y]`` with entries ``k(x_i, y_j)``."""
    X = _points(X, k.dim, "X")
    Y = _points(Y, k.dim, "Y")
    return kernel_matrix(k, X, Y)


def kernel_sup_bound(k: KernelSpec) -> float:
    """``sup_x k(x, x)`` over the unit cube (the constant kappa squared)."""
    if k.kind == "poly":
        return float(k.dim) ** k.degree
    return 1.0


def rkhs_dim(k: KernelSpec) -> Optional[int]:
    """Dimension of the RKHS, or None when it is infinite.

    For ``<x, y>**D`` on ``[0, 1]**d`` this is the number of monomials of
    degree exactly ``D`` in ``d`` variables.
    """
    if k.kind == "poly":
        return comb(k.degree + k.dim - 1, k.dim - 1)
    return None
