"""Toolkit for homogeneous systems of polynomial vector fields.

Exact symbolic checks (dilation homogeneity, bracket-rank certificates,
Carnot-group lift verification) together with numerical machinery
(homogeneous norms, anisotropic balls, cutoffs, Sobolev norms, and
empirical constants for interpolation and a-priori inequalities).
"""

from .analysis import (
    CutoffSpec,
    FamilyMember,
    InequalityReport,
    SobolevReport,
    apriori_harness,
    cutoff_derivative_bounds,
    default_family,
    interpolation_harness,
    make_cutoff,
    phi_functional,
    sobolev_norm,
)
from .fields import (
    MultiIndex,
    VectorField,
    VectorFieldSystem,
    apply_operator,
    check_h1,
    lie_bracket,
    nested_bracket,
)
from .geometry import (
    Ball,
    HomNorm,
    ball_inclusions_check,
    ball_measure,
    hom_norm_value,
)
from .hormander import (
    HormanderCertificate,
    check_rank_at_origin,
    check_rank_at_point,
    minimal_depth,
)
from .jets import Jet
from .lifting import (
    CarnotGroupSpec,
    projected_norm_sandwich,
    verify_group,
    verify_lift,
)
from .poly import Poly
from .quadrature import QuadratureConfig
from .scalarfield import NonSmoothPointError, ScalarField, jet, parse_prefix
from .systems import (
    chain_system,
    grushin_family,
    grushin_lift,
    grushin_system,
    grushin2_lift,
    load_lift,
    load_system,
)

__version__ = "0.1.0"

__all__ = [
    "Ball",
    "CarnotGroupSpec",
    "CutoffSpec",
    "FamilyMember",
    "HomNorm",
    "HormanderCertificate",
    "InequalityReport",
    "Jet",
    "MultiIndex",
    "NonSmoothPointError",
    "Poly",
    "QuadratureConfig",
    "ScalarField",
    "SobolevReport",
    "VectorField",
    "VectorFieldSystem",
    "apply_operator",
    "apriori_harness",
    "ball_inclusions_check",
    "ball_measure",
    "chain_system",
    "check_h1",
    "check_rank_at_origin",
    "check_rank_at_point",
    "cutoff_derivative_bounds",
    "default_family",
    "grushin_family",
    "grushin_lift",
    "grushin_system",
    "grushin2_lift",
    "hom_norm_value",
    "interpolation_harness",
    "jet",
    "lie_bracket",
    "load_lift",
    "load_system",
    "make_cutoff",
    "minimal_depth",
    "nested_bracket",
    "parse_prefix",
    "phi_functional",
    "projected_norm_sandwich",
    "sobolev_norm",
    "verify_group",
    "verify_lift",
]
