"""Twisted Ruelle and Selberg zeta functions, regularized determinants and torsion.

The package is organised by layer:

``core``
    Geodesic classes, length spectra, presentations and their file formats.
``geodesics``
    Word enumeration of conjugacy classes for subgroups of SL(2, C).
``reps``
    Representations on words and local Euler factors.
``zeta``
    Truncated Ruelle and Selberg products with certified error bounds.
``regdet``
    Zeta-regularized determinants of finite or tailed spectra.
``torsion``
    Reidemeister and Cappell-Miller torsion of starred cochain complexes,
    and the small-``s`` limit check for the Ruelle function.
``verify``
    Bundled verification suites used by the command line.
"""

from .core import (
    ComplexLength,
    GeodesicClass,
    GroupPresentation,
    LengthSpectrum,
    RepresentationSpec,
    validate_spectrum,
)
from .errors import TorsionZetaError
from .geodesics import complex_length_of, counting_function, enumerate_classes, primitive_decompose
from .regdet import (
    SpectralData,
    TailModel,
    graded_det,
    log_branch,
    reg_det_finite,
    reg_det_with_tail,
)
from .reps import SymmetricPowerOfLength, symmetric_power_rep
from .torsion import (
    CochainComplex,
    StarStructure,
    cappell_miller_torsion,
    fried_constant,
    fried_limit_check,
    order_h,
    reidemeister_torsion,
)
from .zeta import (
    casimir_shift,
    casimir_shift_general,
    det_formula_exponents,
    log_euler_sum,
    ruelle_zeta,
    selberg_zeta,
)

__version__ = "0.1.0"

__all__ = [
    "ComplexLength",
    "GeodesicClass",
    "GroupPresentation",
    "LengthSpectrum",
    "RepresentationSpec",
    "validate_spectrum",
    "TorsionZetaError",
    "complex_length_of",
    "counting_function",
    "enumerate_classes",
    "primitive_decompose",
    "SpectralData",
    "TailModel",
    "graded_det",
    "log_branch",
    "reg_det_finite",
    "reg_det_with_tail",
    "SymmetricPowerOfLength",
    "symmetric_power_rep",
    "CochainComplex",
    "StarStructure",
    "cappell_miller_torsion",
    "fried_constant",
    "fried_limit_check",
    "order_h",
    "reidemeister_torsion",
    "casimir_shift",
    "casimir_shift_general",
    "det_formula_exponents",
    "log_euler_sum",
    "ruelle_zeta",
    "selberg_zeta",
]
