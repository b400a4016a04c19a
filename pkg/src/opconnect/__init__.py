"""Connection coefficients between monic orthogonal polynomial families whose
measures differ by a reciprocal linear or quadratic factor.

Core objects: numeric :class:`Context` (exact rational or arbitrary-precision
float), :class:`RecurrenceCoefficients`, :class:`MeasureSpec`,
:class:`DivisorSpec`, :class:`ConnectionCoefficients`.  The transform entry
points are :func:`kappa_sequence` / :func:`transformed_recurrence` for linear
divisors, :func:`symmetric_lambda_sequence`, :func:`general_quadratic_sequence`
and :func:`compose_linear_factors` for quadratic ones, with quadrature-backed
oracles in :mod:`opconnect.oracle` for verification.
"""

from .catalog import (FamilySpec, family_measure, family_recurrence,
                      reference_kappa, reference_lambda, reference_normalization)
from .connection import AUTO, ConnectionCoefficients, DivisorSpec
from .errors import (BackendUnsupported, EigenFailure, FactorizationUnavailable,
                     InsufficientCoefficients, IntegrandSingular, InvalidDivisor,
                     InvalidFamily, NoClosedForm, NotSymmetric, OpconnectError,
                     OracleSingular, PositivityViolation, PrecisionExhausted,
                     QuadratureDivergent, RegularityBreakdown)
from .expansion import (ParsevalReport, evaluate_partial_sum, fourier_coefficients,
                        inversion_coefficients, parseval_residual)
from .linear import (apply_connection, check_divisor_validity, kappa_sequence,
                     normalization_constant, resolve_divisor, transformed_recurrence)
from .measures import MeasureSpec, continuous_measure, discrete_measure
from .numerics import Context, DEFAULT_CONTEXT, RATIONAL_CONTEXT, Scalar
from .oracle import (direct_connection, gram_matrix, gram_schmidt_moments,
                     measure_moments)
from .quadrature import (QuadratureRule, gauss_rule, integrate, integrate_adaptive,
                         integrate_vector_adaptive)
from .quadratic import (compose_linear_factors, general_quadratic_sequence,
                        symmetric_lambda_sequence, symmetric_transformed_recurrence)
from .recurrence import (JacobiMatrix, RecurrenceCoefficients, eval_monic_sequence,
                         jacobi_matrix, squared_norm)

__version__ = "0.1.0"
