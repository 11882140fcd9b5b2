"""Characteristic determinants and eigenvalue counts for n-th order
two-point boundary value problems on [0, 1].

The headline computation: for operators whose coefficients satisfy the
midpoint symmetry p_m(x) = (-1)^m p_m(1-x) and boundary conditions
u^(n-j)(0) + d(-1)^(j+1) u^(n-j)(1) = 0, the characteristic determinant is
independent of lambda and proportional to (1-d^2)^(n/2) -- so the spectrum
is the whole complex plane at d = +-1 and empty otherwise.  The package
computes the determinant for arbitrary two-point conditions, verifies the
collapse numerically, and counts eigenvalues by the argument principle.
"""

from .coefficients import (
    CoefficientFunction,
    CoefficientSet,
    make_coefficient,
    reflect_negate,
    symmetrize,
    symmetry_residual,
)
from .determinant import (
    BoundaryForm,
    CharDetSample,
    SpectralProblem,
    bc_matrix,
    char_det,
    char_det_many,
    factorization_check,
    predicted_delta,
)
from .integrator import (
    FundamentalMatrixPair,
    IntegratorConfig,
    QuadratureError,
    StiffnessError,
    companion_rhs,
    integrate_fundamental,
    integrate_fundamental_many,
    solve_initial_value,
    wronskian_predicted,
)
from .oracles import (
    OracleResult,
    brute_force_det,
    const_coeff_fundamental,
    dirichlet_reference,
)
from .parity import (
    ParityCombination,
    bc_residual,
    eigenspace_rank,
    parity_combination,
    reflection_residual,
)
from .spectrum import (
    ContourError,
    Rectangle,
    RootNotFoundError,
    SpectrumFillsPlaneError,
    ZeroCountReport,
    count_zeros,
    refine_root,
    scan_grid,
)

__version__ = "0.1.0"

__all__ = [
    "CoefficientFunction",
    "CoefficientSet",
    "make_coefficient",
    "reflect_negate",
    "symmetrize",
    "symmetry_residual",
    "BoundaryForm",
    "CharDetSample",
    "SpectralProblem",
    "bc_matrix",
    "char_det",
    "char_det_many",
    "factorization_check",
    "predicted_delta",
    "FundamentalMatrixPair",
    "IntegratorConfig",
    "QuadratureError",
    "StiffnessError",
    "companion_rhs",
    "integrate_fundamental",
    "integrate_fundamental_many",
    "solve_initial_value",
    "wronskian_predicted",
    "OracleResult",
    "brute_force_det",
    "const_coeff_fundamental",
    "dirichlet_reference",
    "ParityCombination",
    "bc_residual",
    "eigenspace_rank",
    "parity_combination",
    "reflection_residual",
    "ContourError",
    "Rectangle",
    "RootNotFoundError",
    "SpectrumFillsPlaneError",
    "ZeroCountReport",
    "count_zeros",
    "refine_root",
    "scan_grid",
]
