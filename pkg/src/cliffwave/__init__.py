"""Clifford-valued diffusive wavelets on spheres and on Spin(m)."""

from .clifford import Multivector, blade_sign, exact, basis_vector, blade
from .spin import SpinElement, exp_bivector, action_h, action_l, rotation_matrix, killing_form

__all__ = [
    "Multivector",
    "blade_sign",
    "exact",
    "basis_vector",
    "blade",
    "SpinElement",
    "exp_bivector",
    "action_h",
    "action_l",
    "rotation_matrix",
    "killing_form",
]
