"""Double-precision Faddeeva function w(z) from a Fourier-derived rational
approximation, with related special functions and validation tooling."""
from .core import (
    CF_DEPTH,
    BatchResult,
    EvaluationResult,
    FaddeevaError,
    OutOfRangeError,
    PoleProximityError,
    Region,
    RegionTag,
    evaluate,
    evaluate_batch,
    exp_neg_square,
    faddeeva,
    mirror_negative_x,
    psi_eval,
    reflect_lower_half,
    w_continued_fraction,
    w_narrow_band,
    w_rational,
)
from .params import (
    ApproximationParams,
    CoefficientSet,
    coefficients_for,
    default_setup,
    derive_coefficients,
    make_params,
)
from .related import (
    VoigtPair,
    dawson,
    erf_complex,
    erfc_scaled,
    fresnel,
    normal_distribution,
    plasma_dispersion,
    voigt,
)

__version__ = "0.1.0"
