"""Spectral-truncation kernels for function-valued learning on the torus."""

from .errors import (
    AliasingError,
    BetaMonotonicityWarning,
    BudgetError,
    ConfigError,
    GridMismatchError,
    NumericalError,
    SolverFallbackWarning,
)
from .torus import (
    FunctionTuple,
    SampledFunction,
    TorusGrid,
    fourier_coeff,
    integrate,
    l2_distance,
    window_integral,
)
from .truncation import (
    ToeplitzRep,
    adjoint,
    matmul,
    matpow,
    operator_norm,
    smooth,
    sn_map,
    sn_map_at,
    truncate,
)
from .fejer import (
    beta_from_policy,
    dirichlet,
    fejer_1d,
    fejer_convolve,
    fejer_min_estimate,
    fejer_multi,
    fejer_multi_oracle,
    lattice_points_mP,
    polyhedron_contains,
    q_set_union,
)
from .kernels import (
    INF,
    GaussianKernel,
    KernelSpec,
    L2GaussianTupleKernel,
    LinearKernel,
    PolyKernel,
    PolynomialKernel,
    ProdKernel,
    SepKernel,
    evaluate,
    k_poly,
    k_prod,
    k_sep,
    kernel_limit_gap,
)
from .regression import (
    GramField,
    PDReport,
    RidgeModel,
    assemble_gram,
    check_pd,
    fit,
    predict,
    test_error,
)
from .diagnostics import (
    ComplexityReport,
    bound_rhs,
    complexity_D,
    complexity_report,
    complexity_sweep,
    convergence_report,
)
from .experiments import (
    InpaintConfig,
    SyntheticConfig,
    gen_synthetic,
    run_eigen_study,
    run_inpaint,
    run_synthetic,
)

__version__ = "0.1.0"
