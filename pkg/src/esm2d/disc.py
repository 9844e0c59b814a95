"""Far-field pattern of a sound-soft disc and the sampling-kernel matrices.

The far field of a sound-soft disc of radius R for an incident plane wave,
as a function of the angle theta between observation and incidence
directions, is

    u_inf(theta) = -e^{-i pi/4} sqrt(2/(pi k))
                   [ J_0(kR)/H_0(kR) + 2 sum_{n>=1} J_n(kR)/H_n(kR) cos(n theta) ]

with H_n the Hankel function of the first kind.  Translating the disc to
center z multiplies the far field by the plane-wave phase
e^{i k z.(d - xhat)}.  Discretizing the resulting far-field equation on
direction grids, with the observation-side phase moved to the right-hand
side, yields the kernel matrix

    A_z[l, j] = e^{i k z.d_j} u_inf(angle(xhat_l, d_j))

so that A_z = A_0 diag(e^{i k z.d_j}) exactly; all sampling points share
one factorization of A_0.
"""

from __future__ import annotations

import functools
import math
import warnings
from dataclasses import dataclass, field

import numpy as np

from .bessel import bessel_j_array, bessel_y_array
from .errors import NumericalError
from .validation import as_point, as_unit_vector, check_complex_vector, check_positive

__all__ = [
    "DEFAULT_SERIES_TOL",
    "DiscSpec",
    "DirectionGrid",
    "KernelMatrix",
    "disc_farfield",
    "truncation_order",
    "shifted_farfield",
    "assemble_kernel",
    "modulate_rhs",
]

DEFAULT_SERIES_TOL = 1e-14

# beyond this order the series ratio is treated as exactly zero
_MAX_ORDER = 200


@functools.lru_cache(maxsize=64)
def _series_ratios(k: float, radius: float, tol: float) -> np.ndarray:
    """Coefficients J_n(kR)/H_n^(1)(kR), n = 0..N, with N picked so that the
    ratio and the three following ones are below ``tol``.

    N never drops below ceil(kR) + 10; if no admissible N <= 200 exists the
    argument is out of the supported range.
    """
    kr = k * radius
    n_min = int(math.ceil(kr)) + 10
    if n_min > _MAX_ORDER:
        raise NumericalError(
            f"kR = {kr:g} too large: series order would exceed {_MAX_ORDER}"
        )
    j = bessel_j_array(_MAX_ORDER + 3, kr)
    y = bessel_y_array(_MAX_ORDER + 3, kr)
    ratios = np.zeros(_MAX_ORDER + 4, dtype=complex)
    ok = np.isfinite(y) & (np.abs(y) < 1e280)
    idx = np.nonzero(ok)[0]
    ratios[idx] = j[idx] / (j[idx] + 1j * y[idx])
    mags = np.abs(ratios)
    for n in range(n_min, _MAX_ORDER + 1):
        if np.all(mags[n : n + 4] < tol):
            out = ratios[: n + 1]
            out.setflags(write=False)
            return out
    raise NumericalError(
        f"series for kR = {kr:g} did not reach tolerance {tol:g} by order {_MAX_ORDER}"
    )


@dataclass(frozen=True)
class DiscSpec:
    """Sound-soft sampling disc: radius and wavenumber.

    ``near_bessel_zero`` is set when kR sits within ~1e-6 of a zero of some
    J_n with n up to the series truncation order (measured by a Newton step
    |J_n/J_n'|); the kernel is then nearly rank-deficient in that mode and a
    warning is issued, but evaluation proceeds.
    """

    radius: float
    wavenumber: float
    near_bessel_zero: bool = field(init=False, compare=False)

    def __post_init__(self):
        object.__setattr__(self, "radius", check_positive("radius", self.radius))
        object.__setattr__(
            self, "wavenumber", check_positive("wavenumber", self.wavenumber)
        )
        kr = self.wavenumber * self.radius
        norder = len(_series_ratios(self.wavenumber, self.radius, DEFAULT_SERIES_TOL)) - 1
        j = bessel_j_array(norder + 1, kr)
        jprime = np.empty(norder + 1)
        jprime[0] = -j[1]
        jprime[1:] = 0.5 * (j[:norder] - j[2 : norder + 2])
        dist = np.abs(j[: norder + 1]) / np.maximum(np.abs(jprime), 1e-300)
        flag = bool(np.any(dist < 1e-6))
        object.__setattr__(self, "near_bessel_zero", flag)
        if flag:
            warnings.warn(
                f"kR = {kr:g} is within ~1e-6 of a Bessel-function zero; "
                "the sampling-disc kernel is near-singular in one mode",
                stacklevel=2,
            )

    @property
    def kr(self) -> float:
        return self.wavenumber * self.radius


@dataclass(frozen=True)
class DirectionGrid:
    """Ordered observation/incidence angles on the unit circle."""

    angles: tuple

    def __post_init__(self):
        ang = np.asarray(self.angles, dtype=float).reshape(-1)
        if ang.size == 0:
            raise ValueError("direction grid must contain at least one angle")
        if not np.all(np.isfinite(ang)):
            raise ValueError("direction grid angles must be finite")
        if np.any(ang < 0.0) or np.any(ang >= 2.0 * np.pi):
            raise ValueError("direction grid angles must lie in [0, 2*pi)")
        if ang.size > 1 and not np.all(np.diff(ang) > 0):
            raise ValueError("direction grid angles must be strictly increasing")
        object.__setattr__(self, "angles", tuple(float(a) for a in ang))

    @classmethod
    def uniform(cls, m: int) -> "DirectionGrid":
        """Full uniform grid phi_j = 2*pi*j/m, j = 0..m-1."""
        if m < 1:
            raise ValueError("need at least one direction")
        return cls(tuple(2.0 * np.pi * j / m for j in range(m)))

    def __len__(self) -> int:
        return len(self.angles)

    @property
    def vectors(self) -> np.ndarray:
        ang = np.asarray(self.angles)
        return np.column_stack([np.cos(ang), np.sin(ang)])

    def is_full_uniform(self, rtol: float = 1e-12) -> bool:
        m = len(self.angles)
        ref = 2.0 * np.pi * np.arange(m) / m
        return bool(np.allclose(self.angles, ref, rtol=0.0, atol=rtol))


def truncation_order(disc: DiscSpec, tol: float = DEFAULT_SERIES_TOL) -> int:
    """Smallest admissible truncation order of the disc far-field series."""
    tol = check_positive("tol", tol)
    return len(_series_ratios(disc.wavenumber, disc.radius, tol)) - 1


def _farfield_from_cos(disc: DiscSpec, cos_theta: np.ndarray) -> np.ndarray:
    """Evaluate the far-field series at given cos(theta), vectorized.

    cos(n theta) is generated by the Chebyshev recurrence
    T_{n+1} = 2 c T_n - T_{n-1} on c = cos(theta).
    """
    ratios = _series_ratios(disc.wavenumber, disc.radius, DEFAULT_SERIES_TOL)
    c = np.asarray(cos_theta, dtype=float)
    total = np.full(c.shape, ratios[0], dtype=complex)
    t_prev = np.ones_like(c)
    t_cur = c.copy()
    for r in ratios[1:]:
        total += (2.0 * r) * t_cur
        t_prev, t_cur = t_cur, 2.0 * c * t_cur - t_prev
    pref = -np.exp(-1j * np.pi / 4.0) * math.sqrt(2.0 / (math.pi * disc.wavenumber))
    return pref * total


def disc_farfield(disc: DiscSpec, theta: float) -> complex:
    """Far field of the origin-centered sound-soft disc at included angle theta."""
    theta = float(theta)
    if not math.isfinite(theta):
        raise ValueError(f"theta must be finite, got {theta!r}")
    return complex(_farfield_from_cos(disc, np.array(math.cos(theta))))


def shifted_farfield(disc: DiscSpec, z, xhat, d) -> complex:
    """Far field of the disc translated to center z, observed at xhat for
    incident direction d: the phase e^{i k z.(d - xhat)} times the
    origin-centered pattern at the included angle."""
    z = as_point(z)
    xhat = as_unit_vector(xhat)
    d = as_unit_vector(d)
    cross = xhat[0] * d[1] - xhat[1] * d[0]
    dot = float(xhat @ d)
    theta = math.atan2(abs(cross), dot)  # included angle in [0, pi]
    phase = np.exp(1j * disc.wavenumber * float(z @ (d - xhat)))
    return complex(phase * disc_farfield(disc, theta))


@dataclass
class KernelMatrix:
    """Discretized sampling-disc far-field operator with a cached SVD.

    ``entries[l, j] = e^{i k z.d_j} u_inf(angle(xhat_l, d_j))``; the matrix
    is immutable after assembly and safe to share across threads once
    ``ensure_svd`` has run.
    """

    entries: np.ndarray
    disc: DiscSpec
    center: np.ndarray
    obs: DirectionGrid
    inc: DirectionGrid
    _svd: object = field(default=None, repr=False)

    def __post_init__(self):
        self.entries = np.asarray(self.entries, dtype=complex)
        self.entries.setflags(write=False)
        self.center = as_point(self.center)
        self.center.setflags(write=False)

    @property
    def shape(self):
        return self.entries.shape

    def ensure_svd(self):
        """Compute and cache the SVD factors (idempotent)."""
        if self._svd is None:
            from .tikhonov import svd

            self._svd = svd(self.entries)
        return self._svd

    @property
    def svd_cache(self):
        return self._svd


def assemble_kernel(
    disc: DiscSpec, z, obs: DirectionGrid, inc: DirectionGrid
) -> KernelMatrix:
    """Assemble A_z on the given grids.

    The translation enters only as a diagonal column phase, so the z = 0
    matrix is built first and the factorization A_z = A_0 diag(phase) holds
    exactly.  For identical full uniform grids A_0 is circulant.
    """
    z = as_point(z)
    xv = obs.vectors
    dv = inc.vectors
    cos_theta = np.clip(xv @ dv.T, -1.0, 1.0)
    a0 = _farfield_from_cos(disc, cos_theta)
    if z[0] != 0.0 or z[1] != 0.0:
        phase = np.exp(1j * disc.wavenumber * (dv @ z))
        a0 = a0 * phase[None, :]
    return KernelMatrix(entries=a0, disc=disc, center=z, obs=obs, inc=inc)


def modulate_rhs(k: float, z, obs: DirectionGrid, u) -> np.ndarray:
    """Phase-modulated right-hand side e^{i k z.xhat_l} U_l.

    The factors are unimodular, so the Euclidean norm is preserved.
    """
    k = check_positive("wavenumber", k)
    z = as_point(z)
    u = check_complex_vector("far-field vector", u, length=len(obs))
    phase = np.exp(1j * k * (obs.vectors @ z))
    return phase * u
