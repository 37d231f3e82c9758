"""Weighted convolution algebras of two-variable Dirichlet series.

Coefficient tables on N x N with Dirichlet convolution, formal inversion,
weighted p-norms, weight diagnostics, semicharacter sampling and a
circle-contour holomorphic functional calculus.
"""

from .calculus import (ContourSpec, FunCalcResult, GrowthReport, Phi, RangeEstimate, ResolventSample,
                       ShrinkResult, functional_calculus, growth_scan, parse_phi, poly_eval_direct,
                       range_estimate, resolvent, shrink_weight_search)
from .errors import DomainError, NotAUnitError, PreconditionError, SpecParseError
from .exact import GaussianRational
from .gelfand import (Semicharacter, check_omega_bounded, gelfand_transform, line_character, parse_character,
                      point_character, random_character, spectral_min_estimate, trivial_character)
from .lattice import BoxSpec, divisors2, factorize, make_box, nth_prime, prime_index
from .series import (CoeffTable, basis, convolve, evaluate, evaluate_many, invert_formal, neumann_inverse,
                     parse_series, power, read_series, weighted_p_norm, write_series)
from .weights import (AxisPower, Constant, MultiplicativeFromPrimes, PolyLog, TwoAdic, Weight,
                      beurling_domar_partial, check_submultiplicative, growth_profile, is_admissible,
                      is_almost_monotone, mfp, min_weight, parse_weight)

__version__ = "0.1.0"
