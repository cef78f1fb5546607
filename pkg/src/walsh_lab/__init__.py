"""Walsh-Fourier analysis on the dyadic group and its square.

Step functions on dyadic cells, the Walsh-Paley system and its fast
transform, dyadic martingale Hardy spaces, strong summability
functionals, and the sharpness construction for cone-restricted strong
summability of two-dimensional Walsh-Fourier series.
"""

from walsh_lab.config import CAPS, Caps
from walsh_lab.dyadic import (
    DyadicPoint,
    ResolutionError,
    SeparableSum2,
    StepFn1,
    StepFn2,
    complement_indicator,
    evaluate_at,
    integrate,
    interval_indicator,
    lp_quasinorm,
    materialize,
    tensor_product,
    weak_lp_quasinorm,
)
from walsh_lab.walsh import (
    Spectrum1,
    Spectrum2,
    coefficient_oracle,
    dirichlet_closed,
    dirichlet_kernel,
    forward_transform,
    inverse_transform,
    rademacher,
    rectangular_partial_sum,
    walsh_paley,
)

__version__ = "0.1.0"

__all__ = [
    "CAPS",
    "Caps",
    "DyadicPoint",
    "ResolutionError",
    "SeparableSum2",
    "Spectrum1",
    "Spectrum2",
    "StepFn1",
    "StepFn2",
    "coefficient_oracle",
    "complement_indicator",
    "dirichlet_closed",
    "dirichlet_kernel",
    "evaluate_at",
    "forward_transform",
    "integrate",
    "interval_indicator",
    "inverse_transform",
    "lp_quasinorm",
    "materialize",
    "rademacher",
    "rectangular_partial_sum",
    "tensor_product",
    "walsh_paley",
    "weak_lp_quasinorm",
]
