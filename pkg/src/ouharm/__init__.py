"""Numerical toolkit for Gaussian harmonic analysis of the
Ornstein-Uhlenbeck operator: Mehler kernel, spectral functional calculus,
Laplace-transform-type multipliers, the admissible three-part decomposition,
conical square functions and tent norms, and hypercontractivity-based
verification suites.
"""

from .errors import KernelOverflowError, NonConvergenceError
from .gaussian import (
    Annulus,
    DEFAULT_CONTEXT,
    GaussianContext,
    RegionSlice,
    admissibility,
    annulus,
    annulus_measure,
    annulus_star,
    ball_measure,
    discrete_admissibility,
    gamma_quadrature,
    gaussian_density,
    hermite_orthonormal,
    lp_norm,
    region_slice,
)
from .spectral import (
    HermiteExpansion,
    SpectralSymbol,
    apply_symbol,
    basis_vector,
    constant_projection,
    expansion,
    maximal_function,
    semigroup,
    t2l_semigroup,
)
from .mehler import (
    TruncatedPolynomial,
    kernel_apply,
    kernel_apply_t2l,
    mehler_kernel,
    mehler_kernel_dt,
)
from .multipliers import (
    PhiSpec,
    apply_multiplier,
    check_bounds,
    check_condition_d,
    check_condition_p,
    make_phi,
    phi_lambda,
)
from .decomposition import (
    DecompositionParams,
    UField,
    build_u,
    pi1,
    pi2,
    pi3,
    reconstruction_residual,
    scaling_constant,
)
from .tent import (
    ConeSpec,
    aperture_compare,
    cone_integral,
    region_square_integral,
    square_function,
    tent_norm,
)
from .harness import (
    SuiteReport,
    hypercontractive_exponent,
    hypercontractivity_suite,
)

__version__ = "0.1.0"
