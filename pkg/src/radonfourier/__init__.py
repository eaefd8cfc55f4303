"""radonfourier: matrix Fourier and Radon-type intertwining integrals over
local fields, with Hilbert-module pairings and a verification suite.

Numerics over R and C ride on closed-form Gaussian calculus backed by
quadrature oracles; everything over Q_p is exact (rational lattice-coset
functions with cyclotomic values).
"""

__version__ = "0.1.0"

from .cyclotomic import (  # noqa: F401
    CyclotomicValue,
    ExactValue,
    cyclo_add,
    cyclo_conj,
    cyclo_eq,
    cyclo_mul,
)
from .fields import (  # noqa: F401
    FieldDescriptor,
    abs_norm,
    add_char,
    complex_field,
    padic_field,
    padic_frac_part,
    padic_valuation,
    real_field,
)
from .functions import (  # noqa: F401
    Envelope,
    Evaluable,
    GaussianForm,
    SBFunction,
    cutoff_chi,
    evaluate,
    fiber_restrict,
    function_from_json,
    integrate,
    pointwise_mul,
    pullback_linear,
    translate_group,
)
from .geometry import (  # noqa: F401
    Fiber,
    KAKFactors,
    MatrixSpace,
    act_g_x,
    act_g_y,
    act_x_a,
    act_y_a,
    b_map,
    bbar_map,
    cartan_theta,
    fiber_param,
    kak,
    measure_scale,
    rho_weight,
    rho_weight_exponents,
    space_L,
    space_X,
    space_Xbar,
    unimodular_completion,
)
from .hilbert import (  # noqa: F401
    LFunction,
    act_g,
    act_module_X,
    act_module_X_phi,
    act_module_Xbar,
    decay_bound_check,
    hc_dominance_report,
    inner_X,
    inner_Xbar,
    truncation_sequence,
)
from .geometry import hc_majorant  # noqa: F401
from .lattices import (  # noqa: F401
    Coset,
    Lattice,
    affine_preimage,
    lattice_dual,
    lattice_hnf,
    lattice_intersect,
    lattice_volume,
)
from .suite import SuiteConfig, explain_check, run_suite  # noqa: F401
from .transforms import (  # noqa: F401
    compose_shell_stabilized,
    convolve_C,
    convolve_gamma,
    fourier,
    fourier_equivariance_check,
    fourier_slice_verify,
    gamma_n,
    intertwine_I,
    intertwine_equivariance_check,
    kernel_identity_check,
    slice_transform,
    unitarity_verify,
)
