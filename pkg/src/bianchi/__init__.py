"""Congruence computations for SL(2) over imaginary quadratic integer rings."""
from __future__ import annotations

from .ideals import CapacityError, Ideal, factor_ideal, parse_ideal, split_type
from .indexcalc import Caps, index_formula
from .quadring import QuadInt, RingSpec, make_ring

__version__ = "0.1.0"

__all__ = [
    "CapacityError",
    "Caps",
    "Ideal",
    "QuadInt",
    "RingSpec",
    "factor_ideal",
    "index_formula",
    "make_ring",
    "parse_ideal",
    "split_type",
]
