"""Exact Arakelov-style intersection theory on the tree of a curve over
a trivially valued field: piecewise-linear Green-function calculus,
positivity classification, chi-volume, and Hilbert-Samuel experiments.
"""

__version__ = "0.1.0"

from .curve import (
    CurveModel,
    RDivisor,
    degree,
    floor_ceil,
    h0_dim,
    h0_growth_rate,
    is_principal,
    sup_divisors,
)
from .errors import GreentreeError, InfeasibleError, ScenarioError
from .green import (
    Edge,
    MetrisedRDivisor,
    SectionDivisor,
    canonical_metrised,
    convex_envelope_green,
    green_eval,
    height,
    is_psh,
    lin_comb_metrised,
    make_metrised,
    mu_ess,
    mu_inf_point,
    mu_inf_total,
    pairing,
    principal_metrised,
    psh_envelope,
    section_log_norm,
)
from .hilbert_samuel import (
    arakelov_deg,
    arakelov_deg_plus,
    filtration_dim,
    filtration_profile,
    hs_convergence_run,
    inequality_suite,
    phi_star_sum,
)
from .plf import (
    INF,
    NEG_INF,
    PLF,
    DerivativeMeasure,
    derivative_measure,
    energy,
    inf_affine_shift,
    inf_ratio,
    legendre_star,
    lin_comb,
    lower_convex_envelope,
    stieltjes_vs_derivative,
)
from .positivity import (
    Classification,
    DistributionProfile,
    MaximinProgram,
    classify,
    deg_dgt,
    distribution,
    lambda_ess,
    lambda_ess_threshold,
    lambda_ess_witness,
    tilde_eval,
    vol,
    vol_chi,
)

__all__ = [name for name in dir() if not name.startswith("_")]
