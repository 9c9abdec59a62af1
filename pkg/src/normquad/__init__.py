"""normquad: a-priori-planned trapezoid quadrature for high-precision
wavefunction normalization integrals."""

from .analytic_models import (
    DoubleHump,
    Gaussian,
    Power,
    closed_form,
    model_integrand,
    oracle_value,
    plan_double_hump,
    plan_gaussian,
    plan_power,
)
from .normalizer import NormalizationResult, normalize, obtained_precision
from .quadrature import (
    Integrand,
    QuadPlan,
    QuadResult,
    RuleKind,
    apply_basic_rule,
    em_corrected_trapezoid,
    endpoint_derivative,
    extended_simpson,
    extended_trapezoid,
    infinite_trapezoid,
)
from .schrodinger import (
    DoubleWell,
    EigenState,
    Monomial,
    evaluate_wavefunction,
    refine_double_well_ground,
    refine_eigenvalue,
)
from .wkb import (
    fourier_tail,
    plan_double_well,
    plan_monomial_state,
    spatial_tail,
    wkb_energy,
    wkb_prefactor,
)

__version__ = "0.1.0"
