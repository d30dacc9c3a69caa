"""Quantum polynomial interpolation over finite fields, at desk scale.

Exact enumeration of the power-sum map Z(x, y)_j = sum_i y_i x_i^j and
its range, dense statevector simulation of the query algorithms built
on it, and the classical Hankel/root-finding inversion that makes those
algorithms gate-efficient.
"""

from .errors import (
    AttemptsExhaustedError,
    BudgetExceededError,
    FieldMismatchError,
    InsufficientSamplesError,
    NotInGoodRangeError,
    NotPrimeError,
    QInterpError,
    SingularHankelError,
    ValidationError,
    WrongRootCountError,
    ZeroWeightError,
)
from .fields import Field, FieldElement, FqPolynomial, is_prime, poly_roots
from .prony import (
    CanonicalPair,
    char_poly_from_z,
    check_recurrence,
    check_sympoly_identity,
    count_valid_extensions,
    elementary_symmetric,
    invert_z,
    invert_z_extended,
    invert_z_with_extension,
)
from .qsim import (
    MeasurementResult,
    StateVector,
    fourier_matrix,
    fourier_on_registers,
    pgm_success_formula,
    phase_query,
    run_interpolation,
    run_pgm,
    run_superposed_rep,
    span_rank,
    standard_query,
)
from .zmap import (
    Budget,
    MultivariateCensus,
    PairXY,
    ProblemParams,
    RangeCensus,
    enumerate_census,
    exponent_tuples,
    is_good_x,
    is_good_y,
    moment_stats,
    multivariate_census,
    poly_eval,
    poly_eval_multi,
    preimage_count,
    success_probability,
    z_eval,
)

__version__ = "0.1.0"

__all__ = [
    "AttemptsExhaustedError",
    "Budget",
    "BudgetExceededError",
    "CanonicalPair",
    "Field",
    "FieldElement",
    "FieldMismatchError",
    "FqPolynomial",
    "InsufficientSamplesError",
    "MeasurementResult",
    "MultivariateCensus",
    "NotInGoodRangeError",
    "NotPrimeError",
    "PairXY",
    "ProblemParams",
    "QInterpError",
    "RangeCensus",
    "SingularHankelError",
    "StateVector",
    "ValidationError",
    "WrongRootCountError",
    "ZeroWeightError",
    "char_poly_from_z",
    "check_recurrence",
    "check_sympoly_identity",
    "count_valid_extensions",
    "elementary_symmetric",
    "enumerate_census",
    "exponent_tuples",
    "fourier_matrix",
    "fourier_on_registers",
    "invert_z",
    "invert_z_extended",
    "invert_z_with_extension",
    "is_good_x",
    "is_good_y",
    "is_prime",
    "moment_stats",
    "multivariate_census",
    "pgm_success_formula",
    "phase_query",
    "poly_eval",
    "poly_eval_multi",
    "poly_roots",
    "preimage_count",
    "run_interpolation",
    "run_pgm",
    "run_superposed_rep",
    "span_rank",
    "standard_query",
    "success_probability",
    "z_eval",
]
