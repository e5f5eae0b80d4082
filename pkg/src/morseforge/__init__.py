"""morseforge: exact synthesis of polynomials with a prescribed set of
minima, the associated descent fields, and independent verification."""

from ._rat import Rat, rat, rat_str
from .coord_change import (
    CoordChange,
    PointSet,
    PointSetError,
    build_coord_change,
    build_interpolants,
    build_linear,
    choose_direction,
)
from .morse_scalar import (
    AlphaSpec,
    MorsePair,
    build_alpha,
    build_f,
    build_pair,
    certify_critical_set,
    hessian_f,
)
from .poly import DimensionMismatch, MultiPoly, PolyMap, compose_map, gradient
from .synth import (
    SaddleField,
    SynthesisResult,
    build_saddle_field,
    gradient_field,
    hessian_at,
    synthesize,
)
from .verify import (
    BoxSpec,
    CertReport,
    FlowConfig,
    FlowTrace,
    NewtonConfig,
    basin_sample,
    certify,
    default_box,
    eigen_signs,
    fd_gradient_check,
    integrate_flow,
    newton_search,
)

__version__ = "0.1.0"
