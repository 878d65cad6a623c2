"""Exact-arithmetic toolkit verifying the 3-adic congruence family of
2-elongated plane partitions, with reusable q-series, eta-quotient,
modular-curve-cusp, and localized-polynomial-ring components."""

from .series import (
    EtaQuotient,
    QSeries,
    a_quotient,
    dk_series,
    eta_quotient_series,
    x_quotient,
    z_quotient,
)
from .cusps import Cusp, cusps_of, cusp_equivalent, ligozat_order, newman_is_modular, radu_lower_bound
from .locring import LocalizedElement, apply_u_monomial, apply_u_element, v_membership
from .report import VerificationReport

__all__ = [
    "EtaQuotient",
    "QSeries",
    "Cusp",
    "LocalizedElement",
    "VerificationReport",
    "a_quotient",
    "apply_u_element",
    "apply_u_monomial",
    "cusp_equivalent",
    "cusps_of",
    "dk_series",
    "eta_quotient_series",
    "ligozat_order",
    "newman_is_modular",
    "radu_lower_bound",
    "v_membership",
    "x_quotient",
    "z_quotient",
]

__version__ = "0.1.0"
