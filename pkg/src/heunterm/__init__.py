"""Finite-sum hypergeometric solutions of the general and single-confluent Heun equations."""
from .errors import (
    ConvergenceError,
    DegenerateRecurrenceError,
    DomainError,
    HeunTermError,
    OutsideDiskWarning,
    PoleError,
    TerminationConditionError,
    VerificationError,
)
from .numeric import (
    ComplexPolynomial,
    TridiagonalBand,
    continuant_char_poly,
    falling_factorial_poly,
    pochhammer,
    poly_roots,
    stirling_first,
)
from .pfq import (
    PFqSpec,
    SeriesWindow,
    augment_parameters,
    evaluate_ratio_form,
    pfq_coefficients,
    pfq_derivative_series,
    pfq_eval,
)
from .general import GeneralHeunParams, GeneralTermination, gh_solution_value, gh_terminate
from .confluent import ConfluentHeunParams, ConfluentTermination, ch_solution_value, ch_terminate
from .oracle import FrobeniusSeries, frobenius_confluent, frobenius_general

__version__ = "0.1.0"
