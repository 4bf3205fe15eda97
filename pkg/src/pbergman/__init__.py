"""Numerical laboratory for p-Bergman kernels, metrics, and the extremal
problems behind them on planar circular domains, plus an L^p-integrability
criterion for lacunary power series on the unit disk."""

from .geometry import (
    Domain,
    QuadratureGrid,
    build_grid,
    format_domain,
    lp_norm,
    parse_domain,
)
from .series import (
    BasisSpec,
    CoeffVector,
    admissible_exponents,
    derivative_at,
    evaluate,
    read_coeffs_csv,
    write_coeffs_csv,
)
from .solver import (
    ExtremalProblem,
    InfeasibleConstraintsError,
    Solution,
    SolverConfig,
    derivative_constraint,
    kkt_residual,
    minimize_pnorm,
    multistart_minimize,
    point_constraint,
    smoothed_objective,
    solution_record,
)
from .kernel import (
    BoundaryMarginError,
    KernelResult,
    MetricResult,
    default_basis,
    default_grid,
    h_function,
    kernel_metric_sweep,
    metric_at,
    mp_minimizer,
    offdiag_kernel,
    write_sweep_csv,
)
from .analysis import (
    DegenerateFitError,
    HolderFit,
    LeviRecord,
    LimitRecord,
    dp_estimate,
    fit_power_law,
    holder_exponent,
    hp_scaling_exponent,
    levi_form_log_kp,
    levi_metric_gap,
    limit_sweep,
    quarter_laplacian,
    write_holder_csv,
    write_levi_csv,
    write_limit_csv,
)
from .lacunary import (
    LacunarySeries,
    NotLacunaryError,
    RadialQuadrature,
    RefinementError,
    UndersampledQuadratureError,
    circle_norm_ratio,
    criterion_integral,
    direct_lp,
    equivalence_ratio,
    integrability_record,
    lacunarity_constant,
    read_series_csv,
    series_grid_values,
    tail_triangle_check,
    write_series_csv,
)

__version__ = "0.1.0"
