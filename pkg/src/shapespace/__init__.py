"""Elastic shape analysis of planar curves with reparameterization-invariant
path metrics, plus the Heisenberg toy bundle used to check the constructions
in closed form.
"""

from .bundles import (
    gauge_inner,
    horizontal_project,
    horizontal_residual,
    normal_project,
    quotient_inner,
    section_tangent_project,
    vertical_field,
)
from .curves import (
    DiffeoGrid,
    FrameData,
    SampledCurve,
    align_ellipse,
    align_start_tangent,
    center_centroid,
    circle,
    compute_frame,
    ellipse,
    random_diffeo,
    reparameterize,
    scale_area,
    scale_length,
    segment,
    start_to_origin,
    to_arclength,
)
from .elastic import ElasticParams, TangentField, ds_derivative, elastic_inner, elastic_norm
from .errors import (
    AmbiguousAlignmentError,
    DegenerateCurveError,
    GridMismatchError,
    NumericalError,
    OptimizerAbort,
    ShapeSpaceError,
    SolverError,
    ValidationError,
)
from .optimize import OptimizerConfig, OptimizerTrace, init_path, straighten
from .paths import (
    VARIANTS,
    CurvePath,
    MetricChoice,
    PathGauge,
    energy_and_gradient,
    gauge_act_path,
    path_energy,
    path_length,
    path_report,
    path_velocity,
    quotient_agreement_report,
    random_path_gauge,
)

__version__ = "0.1.0"
