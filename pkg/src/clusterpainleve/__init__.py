"""Exact cluster-algebra mutation, Somos and q-Painleve orbits, and co-primeness checks."""
from .errors import (BudgetExceeded, ClusterPainleveError, DivisionByZero, NotDivisible,
                     SingularityEncountered, SingularSubstitution, UsageError)
from .laurent import LaurentPoly, Monomial, VarTable, exact_div, gcd, is_unit, monomial_part, substitute
from .rational import RationalFunction, coprime_rf

__version__ = "0.1.0"
