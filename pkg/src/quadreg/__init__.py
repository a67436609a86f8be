"""Desk-scale quadratic uniformity toolkit over F_p^n."""

from .gf import Group, group
from .factors import QuadraticFactor, trivial_factor

__all__ = ["Group", "group", "QuadraticFactor", "trivial_factor"]
__version__ = "0.1.0"
