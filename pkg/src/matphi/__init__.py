"""Matrix phi-functions ``phi_0(A) = exp(A), phi_1(A), ..., phi_p(A)``.

All ``p + 1`` functions come out of one scaling-and-recovering run: a
shared-denominator Pade approximant at ``2^-s A`` followed by ``s`` sweeps
of the double-argument formula.

>>> import numpy as np
>>> from matphi import phi_funm
>>> res = phi_funm(np.array([[0.0, 1.0], [0.0, 0.0]]), 2)
>>> res.phis[1]
array([[1. , 0.5],
       [0. , 1. ]])
"""

__version__ = "0.1.0"

from .densemat import PhiContext, SingularPivotError, Structure
from .mmio import MatrixParseError, read_matrix, write_mtx
from .pade import OPTIMAL_DEGREES, THETA, UNIT_ROUNDOFF, pade_coeffs, theta
from .phieval import PhiResult, phi_funm, phi_funm_fixed
from .selection import SelectionResult, select_parameters

__all__ = [
    "OPTIMAL_DEGREES",
    "THETA",
    "UNIT_ROUNDOFF",
    "MatrixParseError",
    "PhiContext",
    "PhiResult",
    "SelectionResult",
    "SingularPivotError",
    "Structure",
    "pade_coeffs",
    "phi_funm",
    "phi_funm_fixed",
    "read_matrix",
    "select_parameters",
    "theta",
    "write_mtx",
]
