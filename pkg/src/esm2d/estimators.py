"""Scikit-learn style estimators wrapping the sampling pipeline.

Both estimators follow the fit/attributes convention: hyperparameters go
to ``__init__`` unchanged (so ``get_params``/``set_params`` work and the
objects compose with model-selection tooling), ``fit`` consumes a
:class:`~esm2d.forward.FarFieldData` and exposes trailing-underscore
results.  When the data holds several incident directions their raw
indicators are summed before normalization.
"""

from __future__ import annotations

import numpy as np
from sklearn.base import BaseEstimator

from .disc import DiscSpec
from .forward import FarFieldData
from .sampling import (
    EsmConfig,
    Reconstruction,
    SamplingGrid,
    combine_indicators,
    indicator_field,
    prepare_kernel,
    raw_indicator_at_points,
    run_multilevel,
)
from .tikhonov import RegConfig

__all__ = ["ExtendedSamplingLocator", "MultilevelLocator"]


def _as_data(X) -> FarFieldData:
    if isinstance(X, FarFieldData):
        return X
    if isinstance(X, (str, bytes)) or hasattr(X, "__fspath__"):
        from .fileio import read_farfield

        return read_farfield(X)
    raise TypeError(
        "fit expects FarFieldData or a path to an esm-ff file, "
        f"got {type(X).__name__}"
    )


def _reg_config(alpha, morozov_delta) -> RegConfig:
    if morozov_delta is not None:
        return RegConfig.morozov(morozov_delta, fallback_alpha=alpha)
    return RegConfig.fixed(alpha)


class ExtendedSamplingLocator(BaseEstimator):
    """Locate a scatterer from far-field data of one (or a few) plane waves.

    Parameters
    ----------
    radius : float
        Sampling-disc radius.
    bounds : tuple (x_min, x_max, y_min, y_max)
        Probe-domain rectangle; it must contain the scatterer.
    spacing : float
        Probe-lattice step.
    alpha : float
        Tikhonov parameter (also the fallback when Morozov brackets fail).
    morozov_delta : float or None
        Relative discrepancy for the Morozov rule; None keeps alpha fixed.
    aperture : (lo, hi) or None
        Optional observation-angle arc restriction.
    kernel_dirs : int or None
        Size of the density direction grid; None infers it from the data.

    Attributes (after ``fit``)
    --------------------------
    indicator_field_ : IndicatorField over the probe lattice.
    reconstruction_  : the sampling disc at the indicator minimizer.
    center_          : minimizer coordinates, shape (2,).
    indicator_min_   : normalized indicator value at the minimizer.
    """

    def __init__(
        self,
        radius=1.0,
        bounds=(-10.0, 10.0, -10.0, 10.0),
        spacing=0.1,
        alpha=1e-5,
        morozov_delta=None,
        aperture=None,
        kernel_dirs=None,
    ):
        self.radius = radius
        self.bounds = bounds
        self.spacing = spacing
        self.alpha = alpha
        self.morozov_delta = morozov_delta
        self.aperture = aperture
        self.kernel_dirs = kernel_dirs

    def _config(self, data: FarFieldData) -> EsmConfig:
        x_min, x_max, y_min, y_max = (float(v) for v in self.bounds)
        return EsmConfig(
            disc=DiscSpec(radius=self.radius, wavenumber=data.k),
            grid=SamplingGrid(x_min, x_max, y_min, y_max, self.spacing),
            reg=_reg_config(self.alpha, self.morozov_delta),
            aperture=self.aperture,
            kernel_dirs=self.kernel_dirs,
        )

    def fit(self, X, y=None):
        data = _as_data(X)
        cfg = self._config(data)
        fields = [
            indicator_field(cfg, data, incident_index=q)
            for q in range(len(data.incident))
        ]
        fld = fields[0] if len(fields) == 1 else combine_indicators(fields)
        z = fld.argmin_point
        self.config_ = cfg
        self.work_data_, self.kernel0_ = prepare_kernel(cfg, data)
        self.indicator_field_ = fld
        self.center_ = np.array(z)
        self.indicator_min_ = fld.min_normalized
        self.reconstruction_ = Reconstruction(
            center=(float(z[0]), float(z[1])),
            radius=float(self.radius),
            indicator_min=fld.min_normalized,
        )
        return self

    def score_samples(self, Z) -> np.ndarray:
        """Raw indicator ||g_z|| at arbitrary probe points (n, 2).

        Small values mean the sampling disc at z can carry the measured
        far field, i.e. the scatterer is likely inside it.
        """
        if not hasattr(self, "kernel0_"):
            raise RuntimeError("estimator is not fitted")
        pts = np.asarray(Z, dtype=float).reshape(-1, 2)
        total = np.zeros(pts.shape[0])
        for q in range(len(self.work_data_.incident)):
            raw, _, _ = raw_indicator_at_points(
                pts, self.kernel0_, self.work_data_, self.config_.reg, q
            )
            total += raw
        return total


class MultilevelLocator(BaseEstimator):
    """Radius-calibrating variant: halves the sampling radius until the
    minimizer escapes the previous reconstruction disc.

    Attributes (after ``fit``): ``reconstruction_``, ``center_``,
    ``radius_``, ``levels_`` (per-level records).
    """

    def __init__(
        self,
        r0=2.4,
        bounds=(-10.0, 10.0, -10.0, 10.0),
        alpha=1e-5,
        morozov_delta=None,
        aperture=None,
        kernel_dirs=None,
        max_levels=6,
    ):
        self.r0 = r0
        self.bounds = bounds
        self.alpha = alpha
        self.morozov_delta = morozov_delta
        self.aperture = aperture
        self.kernel_dirs = kernel_dirs
        self.max_levels = max_levels

    def fit(self, X, y=None):
        data = _as_data(X)
        x_min, x_max, y_min, y_max = (float(v) for v in self.bounds)
        cfg = EsmConfig(
            disc=DiscSpec(radius=self.r0, wavenumber=data.k),
            grid=SamplingGrid(x_min, x_max, y_min, y_max, self.r0 / 2.0),
            reg=_reg_config(self.alpha, self.morozov_delta),
            aperture=self.aperture,
            kernel_dirs=self.kernel_dirs,
        )
        rec = run_multilevel(self.r0, cfg, data, max_levels=self.max_levels)
        self.reconstruction_ = rec
        self.center_ = np.array(rec.center)
        self.radius_ = rec.radius
        self.levels_ = rec.level_history
        return self
