"""Tangent-point geometry of knot thickness, the R^p energies and their minimization."""

from ._parallel import get_num_threads, set_num_threads
from .energy import (
    EnergyValue,
    GradientField,
    clasp_curve,
    clasp_divergence_series,
    loglog_slope,
    rp_energy,
    rp_gradient,
    rp_local,
)
from .estimators import EnergyFeatures, RopelengthMinimizer
from .exceptions import (
    DomainError,
    KnotFileError,
    ResolutionError,
    RopelengthError,
    SingularConfigurationError,
    UnsupportedFeatureError,
)
from .geom import bitangent_sphere_radius, circumradius, tangent_point_radius
from .io import EnergyReport, emit_profile_csv, parse_knot_file, parse_xyz, serialize_knot
from .knot import (
    CurveProfile,
    PolyKnot,
    SymmetryGroup222,
    curvature_torsion_profile,
    generate_circle,
    generate_perturbed_circle,
    generate_stadium,
    generate_torus_knot,
    resample_uniform,
    symmetrize_222,
)
from .optimize import (
    OptimizerConfig,
    RunReport,
    StabilityVerdict,
    criticality,
    minimize_rp,
    polish_critical,
    run_continuation,
    stability_probe,
    straight_segment_detector,
)
from .thickness import (
    bialy_clearance,
    gm_local_thickness,
    local_feature_size_oracle,
    local_thickness,
    ropelength,
    thickness,
)

__version__ = "0.1.0"
