"""Exact and numerical tools for quasi-modular forms on the Fricke groups of level 1, 2, 3."""

__version__ = "0.1.0"

from quasimodular.exactalg import (  # noqa: E402
    LaurentPoly,
    Rational,
    ReducedForm,
    format_poly,
    gcd_multivariate,
    parse_poly,
    reduced_form,
)

__all__ = [
    "__version__",
    "LaurentPoly",
    "Rational",
    "ReducedForm",
    "format_poly",
    "gcd_multivariate",
    "parse_poly",
    "reduced_form",
]
