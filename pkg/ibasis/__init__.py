"""Integral bases for algebras of D-finite functions Q(x)[D]/<L>."""

__version__ = "1.0.0"

from ibasis.core.closure import (  # noqa: E402
    IntegralBasis,
    check_integral,
    compute_B0,
    integral_basis,
    is_globally_integral,
    module_equal,
)
from ibasis.core.hermite import BasisVector, derivative_matrix, hermite_reduce  # noqa: E402
from ibasis.core.logseries import IotaPolicy  # noqa: E402
from ibasis.core.oreops import BasisElement, OrePoly  # noqa: E402
from ibasis.core.parser import parse_operator  # noqa: E402

__all__ = [
    "BasisElement",
    "BasisVector",
    "IntegralBasis",
    "IotaPolicy",
    "OrePoly",
    "check_integral",
    "compute_B0",
    "derivative_matrix",
    "hermite_reduce",
    "integral_basis",
    "is_globally_integral",
    "module_equal",
    "parse_operator",
]
