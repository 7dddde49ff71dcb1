"""Finite-dimensional index calculus for pairs of subspaces, boundary value
realizations and Lagrangian loops.

Submodules: ``numeric`` (tolerances, rank, frames), ``grassmann``
(subspaces and pair indices), ``extension`` (nested pairs, pull-back and
push-forward, operator realizations), ``symplectic`` (Lagrangians and the
Cayley picture), ``homotopy`` (canonical paths), ``family`` (sampled
families and winding numbers).
"""

from fredholm_lab.errors import FredholmLabError, FormulaViolation, SchemaError
from fredholm_lab.grassmann import Subspace, pair_index
from fredholm_lab.numeric import Tolerance, default_tol, get_default_tol, set_default_tol

__version__ = "0.1.0"

__all__ = [
    "FormulaViolation",
    "FredholmLabError",
    "SchemaError",
    "Subspace",
    "Tolerance",
    "default_tol",
    "get_default_tol",
    "pair_index",
    "set_default_tol",
]
