"""The extended sampling method: indicator fields over probe grids.

For every probe point z the far-field equation with the sound-soft disc
kernel is solved in regularized form,

    A_0 diag(e^{i k z.d_j}) g_z = e^{i k z.xhat} U_inf(xhat),

and the indicator is ||g_z||_2 normalized by its grid maximum.  Because
the probe position enters the kernel only through a unimodular diagonal,
one SVD of A_0 serves every z: the fast path solves in the singular basis
of A_0 with the phase-modulated right-hand side, which leaves the norm of
the solution unchanged.  The minimizer z* marks the scatterer location and
the sampling-disc radius is calibrated by a radius-halving multilevel loop
that stops once the new minimizer escapes the previous reconstruction.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace
from typing import Optional

import numpy as np

from .disc import DirectionGrid, DiscSpec, KernelMatrix, assemble_kernel, modulate_rhs
from .forward import FarFieldData
from .tikhonov import BracketError, RegConfig, morozov_alpha, svd, tikhonov_solve
from .validation import check_positive

__all__ = [
    "SamplingGrid",
    "EsmConfig",
    "IndicatorField",
    "LevelRecord",
    "Reconstruction",
    "indicator_at",
    "indicator_field",
    "raw_indicator_at_points",
    "run_esm",
    "run_multilevel",
    "combine_indicators",
    "restrict_aperture",
    "MAX_LEVELS",
]

MAX_LEVELS = 6


@dataclass(frozen=True)
class SamplingGrid:
    """Rectangular probe lattice, row-major with x varying slowest.

    Point (m, n) sits at (x_min + m*h, y_min + n*h); the lattice always
    includes the stated lower bounds and extends to the largest multiple of
    h not beyond the upper bounds (up to a small tolerance absorbing float
    division).
    """

    x_min: float
    x_max: float
    y_min: float
    y_max: float
    spacing: float

    def __post_init__(self):
        check_positive("spacing", self.spacing)
        if not (self.x_max >= self.x_min and self.y_max >= self.y_min):
            raise ValueError("grid bounds must satisfy min <= max")

    @property
    def nx(self) -> int:
        return int(math.floor((self.x_max - self.x_min) / self.spacing + 1e-9)) + 1

    @property
    def ny(self) -> int:
        return int(math.floor((self.y_max - self.y_min) / self.spacing + 1e-9)) + 1

    def __len__(self) -> int:
        return self.nx * self.ny

    @property
    def xs(self) -> np.ndarray:
        return self.x_min + self.spacing * np.arange(self.nx)

    @property
    def ys(self) -> np.ndarray:
        return self.y_min + self.spacing * np.arange(self.ny)

    @property
    def points(self) -> np.ndarray:
        """All lattice points as an (nx*ny, 2) array in row-major order."""
        return np.column_stack(
            [np.repeat(self.xs, self.ny), np.tile(self.ys, self.nx)]
        )


@dataclass(frozen=True)
class EsmConfig:
    """Inversion configuration: sampling disc, probe grid, regularization,
    optional observation aperture, and the size of the direction grid that
    discretizes the unknown density (defaults to the data's own grid when
    that is full uniform, else 52)."""

    disc: DiscSpec
    grid: SamplingGrid
    reg: RegConfig = field(default_factory=RegConfig.fixed)
    aperture: Optional[tuple] = None
    kernel_dirs: Optional[int] = None


@dataclass(frozen=True)
class IndicatorField:
    """Indicator values over a sampling grid.

    ``raw`` holds ||g_z|| per point (row-major); ``normalized`` is raw
    divided by its maximum, so its maximum is exactly one.  ``argmin_index``
    is the first row-major minimizer.  ``alpha_used`` and
    ``morozov_fallback`` carry per-point regularization metadata when
    available (combined fields drop them).
    """

    grid: SamplingGrid
    raw: np.ndarray
    normalized: np.ndarray
    argmin_index: int
    alpha_used: Optional[np.ndarray] = None
    morozov_fallback: Optional[np.ndarray] = None

    def __post_init__(self):
        self.raw.setflags(write=False)
        self.normalized.setflags(write=False)

    @property
    def argmin_point(self) -> np.ndarray:
        return self.grid.points[self.argmin_index]

    @property
    def min_normalized(self) -> float:
        return float(self.normalized[self.argmin_index])

    def as_matrix(self) -> np.ndarray:
        """Normalized values reshaped to (nx, ny)."""
        return self.normalized.reshape(self.grid.nx, self.grid.ny)


@dataclass(frozen=True)
class LevelRecord:
    radius: float
    center: tuple
    contained: bool


@dataclass(frozen=True)
class Reconstruction:
    """Approximate support: the sampling disc centered at the minimizer."""

    center: tuple
    radius: float
    indicator_min: float
    level_history: tuple = ()
    cap_reached: bool = False


def _field_from_raw(grid, raw, alpha_used=None, fallback=None) -> IndicatorField:
    raw = np.asarray(raw, dtype=float)
    peak = float(raw.max()) if raw.size else 0.0
    normalized = raw / peak if peak > 0.0 else np.zeros_like(raw)
    return IndicatorField(
        grid=grid,
        raw=raw,
        normalized=normalized,
        argmin_index=int(np.argmin(raw)),
        alpha_used=alpha_used,
        morozov_fallback=fallback,
    )


def restrict_aperture(data: FarFieldData, arc) -> FarFieldData:
    """Keep only observation angles inside the half-open arc [lo, hi).

    ``hi`` may exceed 2*pi by up to a full turn, which expresses wrapped
    arcs; ``hi = lo + 2*pi`` keeps everything.
    """
    lo, hi = float(arc[0]), float(arc[1])
    two_pi = 2.0 * math.pi
    if not (0.0 <= lo < two_pi) or not (lo < hi <= lo + two_pi):
        raise ValueError(f"invalid aperture arc {arc!r}")
    angles = np.asarray(data.obs.angles)
    span = hi - lo
    if span >= two_pi:
        return data
    mask = np.mod(angles - lo, two_pi) < span
    if not mask.any():
        raise ValueError(f"aperture arc {arc!r} retains no observation angles")
    kept = DirectionGrid(tuple(angles[mask]))
    return replace(
        data, obs=kept, values=np.array(data.values[mask, :]), aperture=(lo, hi)
    )


def _check_wavenumber(cfg: EsmConfig, data: FarFieldData):
    if abs(cfg.disc.wavenumber - data.k) > 1e-12 * max(1.0, abs(data.k)):
        raise ValueError(
            f"config wavenumber {cfg.disc.wavenumber!r} does not match "
            f"data wavenumber {data.k!r}"
        )


def _density_grid(cfg: EsmConfig, data: FarFieldData) -> DirectionGrid:
    if cfg.kernel_dirs is not None:
        return DirectionGrid.uniform(int(cfg.kernel_dirs))
    if data.obs.is_full_uniform():
        return data.obs
    return DirectionGrid.uniform(52)


def prepare_kernel(cfg: EsmConfig, data: FarFieldData):
    """Apply the aperture, pick the density grid, assemble A_0, cache its SVD.

    Returns (working data, kernel at z = 0).
    """
    _check_wavenumber(cfg, data)
    density = _density_grid(cfg, data)
    work = restrict_aperture(data, cfg.aperture) if cfg.aperture is not None else data
    kernel0 = assemble_kernel(cfg.disc, (0.0, 0.0), work.obs, density)
    kernel0.ensure_svd()
    return work, kernel0


def indicator_at(
    z,
    cfg: EsmConfig,
    kernel0: KernelMatrix,
    data: FarFieldData,
    incident_index: int = 0,
    direct: bool = False,
):
    """Indicator ||g_z|| and the regularization parameter used at one point.

    ``data`` must already match the kernel's observation rows.  The default
    fast path solves in the singular basis of ``kernel0``; ``direct=True``
    assembles and factorizes the kernel at z itself (slow, used for
    cross-checks): the two agree because the z-dependence of the kernel is
    a unimodular column scaling.
    """
    z = np.asarray(z, dtype=float)
    u = data.column(incident_index)
    b = modulate_rhs(data.k, z, data.obs, u)
    if direct:
        kernel_z = assemble_kernel(cfg.disc, z, data.obs, kernel0.inc)
        factors = svd(kernel_z.entries)
    else:
        factors = kernel0.ensure_svd()

    reg = cfg.reg
    if reg.is_morozov:
        delta = reg.morozov_delta_rel * float(np.linalg.norm(b))
        try:
            alpha = morozov_alpha(factors, b, delta)
        except BracketError:
            alpha = reg.fallback_alpha
    else:
        alpha = reg.alpha
    g = tikhonov_solve(factors, b, alpha)
    return float(np.linalg.norm(g)), alpha


def _morozov_alphas_vec(sigma, abs_c_sq, perp_sq, delta, feasible, fallback_alpha):
    """Vectorized bisection of the discrepancy equation on log(alpha)."""
    npts = abs_c_sq.shape[0]
    alphas = np.full(npts, fallback_alpha)
    idx = np.nonzero(feasible)[0]
    if idx.size == 0:
        return alphas
    cs = abs_c_sq[idx]
    ps = perp_sq[idx]
    smax2 = float(sigma[0]) ** 2 if sigma.size else 1.0
    lo = np.full(idx.size, max(smax2 * 1e-18, 1e-280))
    hi = np.full(idx.size, max(smax2 * 1e6, 1.0))

    def disc_sq(a):
        damp = (a[:, None] / (sigma[None, :] ** 2 + a[:, None])) ** 2
        return (damp * cs).sum(axis=1) + ps

    target = delta**2
    for _ in range(40):
        need = disc_sq(lo) > target
        if not need.any():
            break
        lo[need] *= 1e-3
    for _ in range(40):
        need = disc_sq(hi) < target
        if not need.any():
            break
        hi[need] *= 1e3
    for _ in range(120):
        mid = np.sqrt(lo * hi)
        below = disc_sq(mid) < target
        lo = np.where(below, mid, lo)
        hi = np.where(below, hi, mid)
    alphas[idx] = np.sqrt(lo * hi)
    return alphas


# probe points per block; bounds the (points x directions) work arrays
_POINT_CHUNK = 262144


def raw_indicator_at_points(
    points,
    kernel0: KernelMatrix,
    data: FarFieldData,
    reg: RegConfig,
    incident_index: int = 0,
):
    """Vectorized ||g_z|| over an arbitrary point set.

    Returns (raw, alpha_used, morozov_fallback_mask_or_None).  ``data``
    must match the kernel's observation rows.  Large point sets are
    processed in fixed-size blocks so memory stays bounded; the block
    split cannot change any value (all points are independent).
    """
    pts = np.asarray(points, dtype=float).reshape(-1, 2)
    factors = kernel0.ensure_svd()
    u = data.column(incident_index)
    xv = data.obs.vectors
    sigma = factors.sigma
    npts = pts.shape[0]

    raw = np.empty(npts)
    alphas = np.full(npts, float(reg.alpha if not reg.is_morozov else reg.fallback_alpha))
    fallback = np.zeros(npts, dtype=bool) if reg.is_morozov else None

    if reg.is_morozov:
        bnorm_sq = float(np.vdot(u, u).real)
        delta = reg.morozov_delta_rel * math.sqrt(bnorm_sq)
    else:
        filt_sq = (sigma / (sigma**2 + reg.alpha)) ** 2

    for start in range(0, npts, _POINT_CHUNK):
        sl = slice(start, min(start + _POINT_CHUNK, npts))
        phase = np.exp(1j * data.k * (pts[sl] @ xv.T))
        coeff = (phase * u[None, :]) @ factors.u.conj()
        abs_c_sq = np.abs(coeff) ** 2
        if reg.is_morozov:
            perp_sq = np.maximum(bnorm_sq - abs_c_sq.sum(axis=1), 0.0)
            feasible = np.sqrt(perp_sq) < delta
            a = _morozov_alphas_vec(
                sigma, abs_c_sq, perp_sq, delta, feasible, reg.fallback_alpha
            )
            fs = (sigma[None, :] / (sigma[None, :] ** 2 + a[:, None])) ** 2
            raw[sl] = np.sqrt((fs * abs_c_sq).sum(axis=1))
            alphas[sl] = a
            fallback[sl] = ~feasible
        else:
            raw[sl] = np.sqrt(abs_c_sq @ filt_sq)

    return raw, alphas, fallback


def indicator_field(
    cfg: EsmConfig, data: FarFieldData, incident_index: int = 0
) -> IndicatorField:
    """Indicator over the whole sampling grid for one incident direction.

    All points share the SVD of the z = 0 kernel; the per-point work is one
    phase modulation and a diagonal solve in the singular basis.  The
    normalization divides by the grid maximum, the reported minimizer is
    the first one in row-major order, and per-point Morozov bracket
    failures fall back to the fixed alpha and are flagged.
    """
    work, kernel0 = prepare_kernel(cfg, data)
    raw, alpha_used, fallback_mask = raw_indicator_at_points(
        cfg.grid.points, kernel0, work, cfg.reg, incident_index
    )
    return _field_from_raw(cfg.grid, raw, alpha_used, fallback_mask)


def run_esm(cfg: EsmConfig, data: FarFieldData, incident_index: int = 0) -> Reconstruction:
    """Single-level reconstruction: the sampling disc at the grid minimizer."""
    fld = indicator_field(cfg, data, incident_index)
    z = fld.argmin_point
    return Reconstruction(
        center=(float(z[0]), float(z[1])),
        radius=cfg.disc.radius,
        indicator_min=fld.min_normalized,
    )


def run_multilevel(
    r0: float,
    cfg_base: EsmConfig,
    data: FarFieldData,
    incident_index: int = 0,
    max_levels: int = MAX_LEVELS,
) -> Reconstruction:
    """Radius-halving loop calibrating the sampling-disc size.

    Level j uses radius R_j = r0 / 2^j on a grid of spacing R_j / 2 over the
    base grid's bounds.  The loop stops when the level-j minimizer leaves
    the previous disc (|z_j - z_{j-1}| > R_{j-1}) and returns the previous
    level; if ``max_levels`` halvings never trigger the exit test the last
    level is returned flagged as capped.
    """
    check_positive("initial radius", r0)
    g = cfg_base.grid
    k = cfg_base.disc.wavenumber

    def level_cfg(radius: float) -> EsmConfig:
        grid = SamplingGrid(g.x_min, g.x_max, g.y_min, g.y_max, radius / 2.0)
        return replace(cfg_base, disc=DiscSpec(radius=radius, wavenumber=k), grid=grid)

    history = []
    prev_z = None
    prev_radius = None
    prev_min = None
    for j in range(max_levels + 1):
        radius = r0 / 2.0**j
        fld = indicator_field(level_cfg(radius), data, incident_index)
        z = fld.argmin_point
        if j == 0:
            contained = True
        else:
            contained = bool(np.hypot(*(z - prev_z)) <= prev_radius)
        history.append(LevelRecord(radius, (float(z[0]), float(z[1])), contained))
        if not contained:
            return Reconstruction(
                center=(float(prev_z[0]), float(prev_z[1])),
                radius=prev_radius,
                indicator_min=prev_min,
                level_history=tuple(history),
            )
        prev_z, prev_radius, prev_min = z, radius, fld.min_normalized
    return Reconstruction(
        center=(float(prev_z[0]), float(prev_z[1])),
        radius=prev_radius,
        indicator_min=prev_min,
        level_history=tuple(history),
        cap_reached=True,
    )


def combine_indicators(fields) -> IndicatorField:
    """Pointwise sum of raw indicators (multi-direction / multi-frequency),
    renormalized by the combined maximum."""
    fields = list(fields)
    if not fields:
        raise ValueError("no indicator fields to combine")
    grid = fields[0].grid
    for f in fields[1:]:
        if f.grid != grid:
            raise ValueError("indicator fields live on different grids")
    total = np.zeros_like(fields[0].raw)
    for f in fields:
        total = total + f.raw
    return _field_from_raw(grid, total)
