"""Dedekind zeta functions, prime splitting, and densities of split primes."""

__version__ = "0.1.0"

from .ffpoly import IntPoly, PolyModP, factor_mod_p, parse_poly
from .numfield import NumberField, cyclotomic_field, field_from_poly, quadratic_field, rational_field
from .splitting import SplittingType, split_prime, splits_completely
from .zetaseries import ideal_counts, riemann_extended, zeta_dirichlet, zeta_euler
from .characters import QuadraticCharacter, kronecker, l_value

__all__ = [
    "IntPoly",
    "PolyModP",
    "factor_mod_p",
    "parse_poly",
    "NumberField",
    "cyclotomic_field",
    "field_from_poly",
    "quadratic_field",
    "rational_field",
    "SplittingType",
    "split_prime",
    "splits_completely",
    "ideal_counts",
    "riemann_extended",
    "zeta_dirichlet",
    "zeta_euler",
    "QuadraticCharacter",
    "kronecker",
    "l_value",
]
