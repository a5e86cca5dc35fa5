"""Radial nodal solutions of Hénon-type equations in the plane and their Morse index."""

from .errors import HenonMorseError
from .models import AngularFourierFunction, Domain, RadialFunction, RadialGrid, RadialProfile
from .nonlinearity import Nonlinearity

__all__ = [
    "AngularFourierFunction",
    "Domain",
    "HenonMorseError",
    "Nonlinearity",
    "RadialFunction",
    "RadialGrid",
    "RadialProfile",
]
