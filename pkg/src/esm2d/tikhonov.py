"""Dense SVD and Tikhonov-regularized least squares.

The regularized solution of A g = b is the spectral filter

    g_alpha = V diag(sigma_i / (sigma_i^2 + alpha)) U^* b,

the unique minimizer of ||A g - b||^2 + alpha ||g||^2.  The discrepancy
||A g_alpha - b|| increases monotonically with alpha from the norm of the
unreachable component of b up to ||b||, which makes the Morozov rule a
bracketed monotone root find on log(alpha).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import NumericalError
from .validation import check_positive

__all__ = [
    "SvdFactors",
    "RegConfig",
    "svd",
    "tikhonov_solve",
    "morozov_alpha",
    "BracketError",
    "DEFAULT_ALPHA",
]

DEFAULT_ALPHA = 1e-5


class BracketError(ValueError):
    """Morozov discrepancy target lies outside the attainable range."""


@dataclass(frozen=True)
class SvdFactors:
    """Thin SVD of a complex matrix: A = U diag(sigma) V^*.

    U is M x r and V is N x r with orthonormal columns; sigma is descending
    and non-negative.  Phases are fixed by making the largest-magnitude
    entry of each right singular vector real positive, so repeated
    factorizations of the same matrix agree.
    """

    u: np.ndarray
    sigma: np.ndarray
    v: np.ndarray

    def __post_init__(self):
        self.u.setflags(write=False)
        self.sigma.setflags(write=False)
        self.v.setflags(write=False)

    @property
    def sigma_max(self) -> float:
        return float(self.sigma[0]) if self.sigma.size else 0.0


def svd(a) -> SvdFactors:
    """Thin SVD with the deterministic phase convention."""
    a = np.asarray(a, dtype=complex)
    if a.ndim != 2:
        raise ValueError(f"expected a matrix, got shape {a.shape}")
    if not np.all(np.isfinite(a.real)) or not np.all(np.isfinite(a.imag)):
        raise ValueError("matrix contains non-finite entries")
    try:
        u, s, vh = np.linalg.svd(a, full_matrices=False)
    except np.linalg.LinAlgError as exc:
        raise NumericalError(f"SVD did not converge: {exc}") from exc
    v = vh.conj().T
    # phase convention: largest-magnitude entry of each right singular
    # vector made real positive (first occurrence on ties)
    idx = np.argmax(np.abs(v), axis=0)
    pivots = v[idx, np.arange(v.shape[1])]
    mags = np.abs(pivots)
    phases = np.where(mags > 0, pivots / np.where(mags > 0, mags, 1.0), 1.0)
    v = v * phases.conj()[None, :]
    u = u * phases.conj()[None, :]
    return SvdFactors(u=u, sigma=s.astype(float), v=v)


def tikhonov_solve(factors: SvdFactors, b, alpha: float) -> np.ndarray:
    """Minimizer of ||A g - b||^2 + alpha ||g||^2 via the spectral filter."""
    alpha = check_positive("alpha", alpha)
    b = np.asarray(b, dtype=complex).reshape(-1)
    if b.shape[0] != factors.u.shape[0]:
        raise ValueError(
            f"right-hand side has length {b.shape[0]}, expected {factors.u.shape[0]}"
        )
    coeff = factors.u.conj().T @ b
    filt = factors.sigma / (factors.sigma**2 + alpha)
    return factors.v @ (filt * coeff)


def _discrepancy(factors: SvdFactors, b, alpha: float) -> float:
    """||A g_alpha - b|| evaluated in the singular basis."""
    coeff = factors.u.conj().T @ b
    perp_sq = max(float(np.vdot(b, b).real - np.vdot(coeff, coeff).real), 0.0)
    damp = alpha / (factors.sigma**2 + alpha)
    return float(np.sqrt(np.sum((damp * np.abs(coeff)) ** 2) + perp_sq))


def morozov_alpha(
    factors: SvdFactors, b, delta: float, rel_tol: float = 1e-10
) -> float:
    """Regularization parameter with discrepancy ||A g_alpha - b|| = delta.

    Requires ||(I - U U^*) b|| < delta < ||b||; otherwise the bracket is
    infeasible and ``BracketError`` is raised (callers fall back to a fixed
    alpha and record the fallback).
    """
    delta = check_positive("delta", delta)
    b = np.asarray(b, dtype=complex).reshape(-1)
    bnorm = float(np.linalg.norm(b))
    coeff = factors.u.conj().T @ b
    perp = float(np.sqrt(max(np.vdot(b, b).real - np.vdot(coeff, coeff).real, 0.0)))
    if not (perp < delta < bnorm):
        raise BracketError(
            f"discrepancy target {delta:g} outside attainable range "
            f"({perp:g}, {bnorm:g})"
        )
    smax = factors.sigma_max
    lo = max(smax**2 * 1e-18, 1e-300)
    hi = max(smax**2 * 1e6, 1.0)
    while _discrepancy(factors, b, lo) > delta and lo > 1e-290:
        lo *= 1e-3
    while _discrepancy(factors, b, hi) < delta and hi < 1e290:
        hi *= 1e3
    # bisection on log(alpha); the discrepancy is monotone increasing
    for _ in range(200):
        mid = np.sqrt(lo * hi)
        d = _discrepancy(factors, b, mid)
        if abs(d - delta) <= rel_tol * delta:
            return float(mid)
        if d < delta:
            lo = mid
        else:
            hi = mid
        if hi / lo < 1.0 + 1e-15:
            break
    return float(np.sqrt(lo * hi))


@dataclass(frozen=True)
class RegConfig:
    """Regularization mode: fixed alpha, or Morozov with relative discrepancy.

    Exactly one of the two is active.  ``fallback_alpha`` is used at
    sampling points where the Morozov bracket is infeasible.
    """

    alpha: float | None = DEFAULT_ALPHA
    morozov_delta_rel: float | None = None
    fallback_alpha: float = DEFAULT_ALPHA

    def __post_init__(self):
        if (self.alpha is None) == (self.morozov_delta_rel is None):
            raise ValueError(
                "exactly one of alpha / morozov_delta_rel must be given"
            )
        if self.alpha is not None:
            check_positive("alpha", self.alpha)
        else:
            d = float(self.morozov_delta_rel)
            if not (0.0 < d < 1.0):
                raise ValueError(
                    f"relative discrepancy must be in (0, 1), got {d!r}"
                )
        check_positive("fallback_alpha", self.fallback_alpha)

    @classmethod
    def fixed(cls, alpha: float = DEFAULT_ALPHA) -> "RegConfig":
        return cls(alpha=alpha, morozov_delta_rel=None)

    @classmethod
    def morozov(cls, delta_rel: float, fallback_alpha: float = DEFAULT_ALPHA) -> "RegConfig":
        return cls(alpha=None, morozov_delta_rel=delta_rel, fallback_alpha=fallback_alpha)

    @property
    def is_morozov(self) -> bool:
        return self.morozov_delta_rel is not None
