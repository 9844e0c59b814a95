"""Extended sampling method for 2D acoustic inverse scattering.

Given the far-field pattern of a single incident plane wave, locate the
scatterer and estimate its support by probing a grid of points: at each
point a Tikhonov-regularized far-field equation is solved whose kernel is
the analytic far field of a sound-soft disc, and the norm of the solution
acts as the indicator.  The package also ships the forward solvers used to
generate synthetic test data, deterministic file formats, and a CLI.
"""

from .bessel import bessel_j, bessel_y, hankel1
from .disc import (
    DirectionGrid,
    DiscSpec,
    KernelMatrix,
    assemble_kernel,
    disc_farfield,
    modulate_rhs,
    shifted_farfield,
    truncation_order,
)
from .errors import NumericalError
from .estimators import ExtendedSamplingLocator, MultilevelLocator
from .fileio import (
    FormatError,
    read_farfield,
    read_indicator_grid,
    write_farfield,
    write_indicator_grid,
)
from .forward import (
    FarFieldData,
    ParametricCurve,
    ScattererSpec,
    add_noise,
    disc_exact_farfield,
    nystrom_dirichlet,
    synthesize_farfield,
)
from .sampling import (
    EsmConfig,
    IndicatorField,
    LevelRecord,
    Reconstruction,
    SamplingGrid,
    combine_indicators,
    indicator_at,
    indicator_field,
    restrict_aperture,
    run_esm,
    run_multilevel,
)
from .tikhonov import (
    BracketError,
    RegConfig,
    SvdFactors,
    morozov_alpha,
    svd,
    tikhonov_solve,
)

__version__ = "0.1.0"

__all__ = [
    "bessel_j",
    "bessel_y",
    "hankel1",
    "DiscSpec",
    "DirectionGrid",
    "KernelMatrix",
    "disc_farfield",
    "truncation_order",
    "shifted_farfield",
    "assemble_kernel",
    "modulate_rhs",
    "ScattererSpec",
    "ParametricCurve",
    "FarFieldData",
    "disc_exact_farfield",
    "nystrom_dirichlet",
    "synthesize_farfield",
    "add_noise",
    "SvdFactors",
    "RegConfig",
    "svd",
    "tikhonov_solve",
    "morozov_alpha",
    "BracketError",
    "SamplingGrid",
    "EsmConfig",
    "IndicatorField",
    "LevelRecord",
    "Reconstruction",
    "indicator_at",
    "indicator_field",
    "run_esm",
    "run_multilevel",
    "combine_indicators",
    "restrict_aperture",
    "ExtendedSamplingLocator",
    "MultilevelLocator",
    "read_farfield",
    "write_farfield",
    "read_indicator_grid",
    "write_indicator_grid",
    "FormatError",
    "NumericalError",
    "__version__",
]
