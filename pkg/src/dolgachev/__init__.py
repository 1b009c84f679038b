"""Exact lattice arithmetic for an exceptional collection on a (2,3)-Dolgachev surface."""

from dolgachev.ratmat import (
    DimensionError,
    DomainError,
    RatMatrix,
    Signature,
    SingularMatrixError,
    det,
    format_rational,
    parse_rational,
    signature,
    smith_normal_form,
    solve,
)

__all__ = [
    "DimensionError",
    "DomainError",
    "RatMatrix",
    "Signature",
    "SingularMatrixError",
    "det",
    "format_rational",
    "parse_rational",
    "signature",
    "smith_normal_form",
    "solve",
]

__version__ = "0.1.0"
