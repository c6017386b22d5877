"""Moebius-geometry Clifford kernel and discrete circular-net engine.

The package provides, bottom up: a dense Clifford algebra of Minkowski
space with the null basis used by the conformal model (:mod:`.algebra`),
the sphere/point dictionary of Moebius geometry (:mod:`.moebius`), lattice
nets with spin frames, edge spheres and their integrability theory
(:mod:`.lattice`), completion of nets from Cauchy data via circle
intersections (:mod:`.cauchy`), an invariant verification suite
(:mod:`.verify`), and file formats plus a CLI (:mod:`.netfile`,
:mod:`.cli`).
"""

from .algebra import (
    AlgebraError,
    ConformalAlgebra,
    GradeError,
    Multivector,
    Versor,
    adjoint_bracket,
    conformal_algebra,
    dual,
    is_pure_blade,
    lambda_inner,
    minkowski_inner,
    projective_distance,
    random_multivector,
    random_spin_versor,
    random_unit_spacelike,
    versor_apply,
)
from .moebius import (
    POINT_AT_INFINITY,
    ConformalPoint,
    CrossRatioValue,
    DegenerateConfiguration,
    DisjointIntersection,
    GeometryError,
    Hypersphere,
    PointAtInfinity,
    SphereBlade,
    TangentIntersection,
    chart_normalize,
    circle_intersect,
    cross_ratio,
    extract_point_pair,
    hypersphere,
    incident_point_circle,
    incident_point_sphere,
    inversion,
    lift,
    plane,
    project,
    sphere_angle,
    sphere_through,
    spheres_orthogonal,
    versor_from_point_pair,
)
from .lattice import (
    ConsistencyError,
    DegenerateEdge,
    EdgeVectorField,
    FrameField,
    Lattice,
    PairNet,
    cell_sphere_check,
    edge_cross_ratio_closed_form,
    edge_sphere,
    face_cross_ratio_closed_form,
    face_sphere_rank,
    frame_from_edge_spheres,
    frames_from_transitions,
    mc_residual_face,
    mc_residual_spheres,
    nets_from_frames,
    propagate_frame,
    reconstruct_pair_net,
    recover_edge_sphere,
    recover_edge_spheres,
    ribaucour_congruence,
    transition_vector,
)
from .cauchy import (
    AmbiguousCompletion,
    CompletionError,
    CompletionReport,
    InitialData,
    circular_quad_completion,
    complete_cell_3d,
    fill_lattice,
    fill_pair_lattice,
    hypercube_fill,
    point_on_circle,
    random_pair_net,
    seed_grid,
    seed_random_circular,
)
from .verify import VerificationReport, verify_net

__version__ = "0.1.0"
