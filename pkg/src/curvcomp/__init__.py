"""Comparison geometry toolkit: model-space trigonometry, curvature
comparison predicates on finite metrics, constructive Lipschitz extension,
barycentric simplices, and ball-intersection machinery."""

from .model_spaces import (
    FLAT,
    SPHERE,
    HYPERBOLOID,
    UNDEFINED,
    INFEASIBLE,
    Curvature,
    ModelPoint,
    ModelConfig,
    ModelTriangle,
    chart_for,
    length_scale,
    pomega,
    dist,
    chart_dist,
    exp_map,
    log_map,
    geodesic_eval,
    model_angle,
    model_triangle,
    side_from_sas,
    realize_triangle,
    embed_simplex,
    cone_point,
    cone_dist,
    fold,
    fold_into_triangle,
)
from .comparisons import (
    FiniteMetric,
    ComparisonReport,
    check_1plus3,
    check_2plus2,
    check_1plusN,
    check_2Nplus2,
    pos_defect,
    overlap_check,
)
from .extension import (
    ExtensionInstance,
    PartialShortMap,
    chebyshev_extend,
    dual_certificate,
    four_point_decision,
    extend_map,
    spherical_extend_via_cone,
)
from .barycentric import (
    WeightVector,
    FunctionArray,
    HALF_SQUARED_DIST,
    COSH_DIST,
    argmin_strongly_convex,
    bary_simplex,
    supset_dominates,
    h_v_argmin,
    frechet_mean,
)
from .convexity import BallSystem, EMPTY, closest_point, helly_witness
from .documents import MetricDocument, ingest_metric
from .fixtures import get_fixture

__version__ = "0.1.0"
