"""Finite-precision p-adic linear algebra and a certified resolvent engine.

The package verifies, on concrete matrices over Q_p, that a matrix is a power
contraction (``||A^m|| <= 1`` for all m) exactly when
``||(R(mu, A) - I)^k|| <= |mu|^k`` for small mu, where
``R(mu, A) = (I - mu A)^-1``.
"""
from .criterion import (
    CriterionRecord,
    CriterionReport,
    converse_direction_suite,
    forward_direction_suite,
    resolvent_contraction_check,
    violation_witness,
)
from .errors import (
    EngineFault,
    InputError,
    PadicDomainError,
    PadicError,
    PrecisionError,
    PremiseError,
    SingularMatrixError,
)
from .linalg import (
    PadicMatrix,
    mat_add,
    mat_mul,
    mat_norm,
    mat_pow,
    mat_sub,
    power_contraction_check,
    scalar_mul,
)
from .oracle import (
    RationalMatrix,
    crosscheck,
    exact_resolvent,
    exact_resolvent_derivative,
    rational_valuation,
)
from .padic import (
    PadicContext,
    PadicScalar,
    add,
    div,
    from_rational,
    kummer_binomial_valuation,
    legendre_factorial_valuation,
    mul,
    neg,
)
from .resolvent import (
    SeriesResult,
    admissible_radius,
    neumann_resolvent,
    resolvent_derivative,
    rminusi_power_series,
    s_operator,
)

__version__ = "0.1.0"
