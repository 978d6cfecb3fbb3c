"""Steady states and reservoir-induced criticality of open free-fermion chains."""

__version__ = "0.1.0"

from .criticality import (  # noqa: E402
    CriticalFamily,
    CriticalityReport,
    RootSet,
    SymbolFraction,
    closest_root_modulus,
    correlation_length,
    criticality_conditions,
    damping_gap,
    damping_gap_finite,
    damping_gap_model,
    damping_spectrum,
    denominator_roots,
    empirical_manifold_dimension,
    model_symbol_fraction,
    moment_conditions,
    moment_order,
    predict_exponents,
    residue_correlations,
    solve_critical_parameters,
    to_symbol_fraction,
)
from .errors import (  # noqa: E402
    CriticalityError,
    DegenerateSteadyStateError,
    FitWindowError,
    ModelTooSmallError,
    ModelValidationError,
    NessError,
    NumericalError,
    QuadratureToleranceError,
    UnsupportedGeneratorError,
)
from .laurent import LaurentPolynomial  # noqa: E402
from .model import (  # noqa: E402
    ComplexAmplitude,
    DampingMatrices,
    FiniteChain,
    HamiltonianStencil,
    InfiniteChain,
    LatticeModel,
    LindbladGenerator,
    build_damping_matrices,
    build_generator_vectors,
    build_symbol_matrices,
    reservoir_symbol,
)
from .ness import (  # noqa: E402
    CorrelationMatrix,
    CorrelationProfile,
    SymbolMatrix,
    correlations_quadrature,
    evolve_finite,
    model_symbol,
    occupation,
    solve_lyapunov_finite,
    solve_symbol_pointwise,
    wick_four_point,
)
