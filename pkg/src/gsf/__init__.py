"""Generalized numbers and generalized smooth functions, sampled on an eps grid."""

from .ext import ExtReal
from .gauge import (
    STANDARD,
    Classification,
    Gauge,
    GenNum,
    OrderEstimate,
    Trilean,
    classify_order,
    is_negligible,
    is_strictly_positive,
    le,
    lt,
)
from .mollifier import Mollifier1D, build_mollifier, chi, default_mollifier
from .functions import GSF, Delta, Heaviside, SmoothFn, compose, embed, identity

__version__ = "0.1.0"

__all__ = [
    "STANDARD",
    "Classification",
    "Delta",
    "ExtReal",
    "GSF",
    "Gauge",
    "GenNum",
    "Heaviside",
    "Mollifier1D",
    "OrderEstimate",
    "SmoothFn",
    "Trilean",
    "build_mollifier",
    "chi",
    "classify_order",
    "compose",
    "default_mollifier",
    "embed",
    "identity",
    "is_negligible",
    "is_strictly_positive",
    "le",
    "lt",
]
