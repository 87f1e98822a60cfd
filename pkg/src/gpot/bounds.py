"""High-probability error bounds for the finite-sample estimators.

Each entry evaluates the right-hand side of one sample-complexity or
perturbation inequality. ``kappa1_sq`` and ``kappa2_sq`` are the kernel
bounds ``sup k_i(x, x)`` (or the fourth-moment constants for the
general-kernel variants), ``m`` the number of sites, ``N`` the number of
realizations, ``delta`` the failure probability. Logarithms are natural.
"""

from __future__ import annotations

from dataclasses import dataclass, fields
from math import log, sqrt
from typing import Callable, Dict, Optional, Tuple

from .errors import InvalidConfig, MissingParameter

__all__ = ["BoundQuery", "BOUND_IDS", "bound_value", "required_params"]


@dataclass(frozen=True)
class BoundQuery:
    bound_id: str
    kappa1_sq: Optional[float] = None
    kappa2_sq: Optional[float] = None
    m: Optional[int] = None
    N: Optional[int] = None
    epsilon: Optional[float] = None
    delta: Optional[float] = None
    dim_hk2: Optional[int] = None
    # Hilbert-Schmidt norms for the perturbation bound.
    hs_a_n: Optional[float] = None
    hs_a: Optional[float] = None
    hs_b: Optional[float] = None
    hs_diff_a: Optional[float] = None
    hs_diff_b: Optional[float] = None


def _conc(m: int, delta: float, k: float) -> float:
    """``2 log(k/delta)/m + sqrt(2 log(k/delta)/m)``."""
    t = 2.0 * log(k / delta) / m
    return t + sqrt(t)


def _gram_bounded(q: BoundQuery) -> float:
    s = q.kappa1_sq + q.kappa2_sq
    return (6.0 / q.epsilon) * s * s * _conc(q.m, q.delta, 6.0)


def _gram_general(q: BoundQuery) -> float:
    s = q.kappa1_sq + q.kappa2_sq
    return (18.0 / q.epsilon) * s * s * (1.0 + 6.0 / q.delta) / (sqrt(q.m) * q.delta)


def _moment_poly(q: BoundQuery, a: float, b: float) -> float:
    k1, k2 = q.kappa1_sq, q.kappa2_sq
    return (1.0 + a / q.delta) * k1 * k1 + (3.0 + b / q.delta) * k1 * k2 + k2 * k2


def _cov_est(q: BoundQuery) -> float:
    return 12.0 * sqrt(3.0) / (q.epsilon * q.delta) * _moment_poly(q, 4.0, 8.0) / sqrt(q.N)


def _samples_bounded(q: BoundQuery) -> float:
    s = q.kappa1_sq + q.kappa2_sq
    sites = (6.0 / q.epsilon) * s * s * _conc(q.m, q.delta, 12.0)
    paths = 24.0 * sqrt(3.0) / (q.epsilon * q.delta) * _moment_poly(q, 8.0, 16.0) / sqrt(q.N)
    return sites + paths


def _w2_gram_term(q: BoundQuery, k: float) -> float:
    c = _conc(q.m, q.delta, k)
    cross = 2.0 * sqrt(2.0) * sqrt(q.kappa1_sq * q.kappa2_sq) * sqrt(q.dim_hk2) * sqrt(c)
    return (q.kappa1_sq + q.kappa2_sq) * c + cross


def _w2_gram(q: BoundQuery) -> float:
    return _w2_gram_term(q, 6.0)


def _w2_paths_term(q: BoundQuery, a: float, b: float, c: float) -> float:
    rn = sqrt(q.N) * q.delta
    inner = a / (q.N * q.delta**2) + b * sqrt(q.m) / rn * (3.0 + c / rn)
    return 3.0 * (sqrt(q.kappa1_sq) + sqrt(q.kappa2_sq)) * sqrt(inner)


def _w2_cov(q: BoundQuery) -> float:
    # Bounds the error of W2 itself, not of its square.
    return _w2_paths_term(q, 4.0, 1.0, 4.0)


def _w2_samples(q: BoundQuery) -> float:
    return sqrt(_w2_gram_term(q, 12.0)) + _w2_paths_term(q, 16.0, 2.0, 8.0)


def _hs_continuity(q: BoundQuery) -> float:
    e = 3.0 / q.epsilon
    return e * (q.hs_a_n + q.hs_a + 2.0 * q.hs_b) * q.hs_diff_a + e * (
        2.0 * q.hs_a_n + q.hs_a + q.hs_b
    ) * q.hs_diff_b


def _sco_op(q: BoundQuery) -> float:
    return 12.0 * sqrt(3.0) / (q.epsilon * q.delta) * _moment_poly(q, 4.0, 8.0) / sqrt(q.N)


def _sco_finite(q: BoundQuery) -> float:
    s = q.kappa1_sq + q.kappa2_sq
    paths = 48.0 * sqrt(3.0) / (q.epsilon * q.delta) * _moment_poly(q, 16.0, 32.0) / sqrt(q.N)
    sites = 864.0 / (q.epsilon * q.delta) * s * s * (1.0 + 12.0 / q.delta) / sqrt(q.m)
    return paths + sites


_KAPPA = ("kappa1_sq", "kappa2_sq")
_HS = ("hs_a_n", "hs_a", "hs_b", "hs_diff_a", "hs_diff_b")

_CATALOG: Dict[str, Tuple[Callable[[BoundQuery], float], Tuple[str, ...]]] = {
    "thm_4_5_gram_bounded": (_gram_bounded, _KAPPA + ("m", "epsilon", "delta")),
    "thm_4_8_gram_general": (_gram_general, _KAPPA + ("m", "epsilon", "delta")),
    "thm_5_1_cov_est": (_cov_est, _KAPPA + ("N", "epsilon", "delta")),
    "thm_5_2_samples_bounded": (_samples_bounded, _KAPPA + ("m", "N", "epsilon", "delta")),
    "thm_6_1_w2_gram": (_w2_gram, _KAPPA + ("m", "delta", "dim_hk2")),
    "thm_6_2_w2_cov": (_w2_cov, _KAPPA + ("m", "N", "delta")),
    "thm_6_3_w2_samples": (_w2_samples, _KAPPA + ("m", "N", "delta", "dim_hk2")),
    "thm_2_2_hs_continuity": (_hs_continuity, ("epsilon",) + _HS),
    "thm_sco_sample_cov_op": (_sco_op, _KAPPA + ("N", "epsilon", "delta")),
    "thm_sco_finite_sample": (_sco_finite, _KAPPA + ("m", "N", "epsilon", "delta")),
}

BOUND_IDS = tuple(_CATALOG)


def required_params(bound_id: str) -> Tuple[str, ...]:
    try:
        return _CATALOG[bound_id][1]
    except KeyError:
        raise InvalidConfig(f"unknown bound id {bound_id!r}; expected one of {BOUND_IDS}") from None


def bound_value(q: BoundQuery) -> float:
    """Evaluate the bound named by ``q.bound_id``.

    Raises
    ------
    MissingParameter
        If a parameter the formula uses is ``None``.
    InvalidConfig
        For an unknown id or out-of-range parameters.
    """
    needed = required_params(q.bound_id)
    missing = [name for name in needed if getattr(q, name) is None]
    if missing:
        raise MissingParameter(f"{q.bound_id} needs {', '.join(missing)}")
    for f in fields(q):
        if f.name not in needed:
            continue
        v = getattr(q, f.name)
        if f.name == "delta":
            if not 0.0 < v < 1.0:
                raise InvalidConfig(f"delta must lie in (0, 1), got {v}")
        elif f.name in ("m", "N", "dim_hk2", "epsilon"):
            if v <= 0:
                raise InvalidConfig(f"{f.name} must be positive, got {v}")
        elif v < 0:
            raise InvalidConfig(f"{f.name} must be nonnegative, got {v}")
    return float(_CATALOG[q.bound_id][0](q))
