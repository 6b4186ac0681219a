"""Mass and center-of-mass functionals on half-space asymptotic models.

The package evaluates, for Riemannian metrics that approach a flat or
hyperbolic half-space model at infinity, the charge-form (flux) and
geometric-form (curvature) versions of the mass and center functionals,
plus a bulk interpolation form in the flat case.  A metric catalog, a
pointwise identity checker, decay-rate admission, and a report-writing
command line sit on top.
"""

from .catalog import CatalogEntry, FAMILIES, build, catalog_names, rotate_entry, tangential_rotation
from .charges import Normalization, flat_reference, hyperbolic_reference
from .errors import (
    AdmissionError,
    ConfigError,
    DegenerateMassError,
    DomainError,
    EvaluationError,
    HalfmassError,
    SingularMetricError,
)
from .geometry import MetricField, rotated_chart
from .identities import (
    DecayReport,
    ResidualReport,
    codazzi_convention,
    codazzi_residual,
    decay_report,
    identity_suite,
    pohozaev_residual,
    static_boundary_residual,
    static_residual,
)
from .invariants import (
    CONVENTIONS,
    CenterResult,
    center_adm,
    center_geometric,
    charge_functional,
    default_radii,
    geometric_functional,
    mass_adm,
    mass_bulk,
    mass_geometric,
)
from .quadrature import LimitEstimate, QuadratureRule, estimate_limit, radius_ladder
from .reporting import VERSION, conventions_payload, curve_report, version_string
from .separable import SeparableField, Term

__version__ = VERSION

__all__ = [
    "AdmissionError",
    "CatalogEntry",
    "CenterResult",
    "ConfigError",
    "CONVENTIONS",
    "DecayReport",
    "DegenerateMassError",
    "DomainError",
    "EvaluationError",
    "FAMILIES",
    "HalfmassError",
    "LimitEstimate",
    "MetricField",
    "Normalization",
    "QuadratureRule",
    "ResidualReport",
    "SeparableField",
    "SingularMetricError",
    "Term",
    "VERSION",
    "build",
    "catalog_names",
    "center_adm",
    "center_geometric",
    "charge_functional",
    "codazzi_convention",
    "codazzi_residual",
    "conventions_payload",
    "curve_report",
    "decay_report",
    "default_radii",
    "estimate_limit",
    "flat_reference",
    "geometric_functional",
    "hyperbolic_reference",
    "identity_suite",
    "mass_adm",
    "mass_bulk",
    "mass_geometric",
    "pohozaev_residual",
    "radius_ladder",
    "rotate_entry",
    "rotated_chart",
    "static_boundary_residual",
    "static_residual",
    "tangential_rotation",
    "version_string",
]
