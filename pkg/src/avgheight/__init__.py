"""Canonical heights in families of elliptic curves over Q(T1..Tn).

Exact sparse polynomial arithmetic, curve families and their specializations,
canonical heights over Q, power-free sieves, and the height-quotient
average experiments built on them.
"""
from .average import average_quotient, line_scan, lower_bound_diagnostic, verify_upper_bound
from .ecq import QPoint, canonical_height, minimal_discriminant, torsion_test
from .errors import AvgHeightError, BudgetExceeded, PreconditionError, SingularSpecialization
from .family import CurveFamily, new_family, running_family, specialize_curve, specialize_point
from .multipoly import MPoly, parse_poly

__version__ = "0.1.0"
