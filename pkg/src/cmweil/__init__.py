"""Weil numbers and abelian varieties with prescribed embedding degree."""

from .cm import (
    CMField,
    CMType,
    enumerate_cm_types,
    equivalence_classes,
    is_primitive,
    make_cyclotomic_cm,
    make_imaginary_quadratic,
    make_quartic_cm,
    parse_cm_type,
    parse_field_spec,
    reflex,
    type_norm,
    type_norm_numeric,
)
from .jacobian import HyperellipticCurve, probable_order_check, twist_search
from .weilgen import (
    WeilNumber,
    cocks_pinch_g1,
    construct_pi,
    exhaustive_search,
    group_order,
    rho,
    rho_bound,
    validate_weil,
)

__all__ = [
    "CMField",
    "CMType",
    "HyperellipticCurve",
    "WeilNumber",
    "cocks_pinch_g1",
    "construct_pi",
    "enumerate_cm_types",
    "equivalence_classes",
    "exhaustive_search",
    "group_order",
    "is_primitive",
    "make_cyclotomic_cm",
    "make_imaginary_quadratic",
    "make_quartic_cm",
    "parse_cm_type",
    "parse_field_spec",
    "probable_order_check",
    "reflex",
    "rho",
    "rho_bound",
    "twist_search",
    "type_norm",
    "type_norm_numeric",
    "validate_weil",
]
