"""Formal neighborhoods of elliptic curves with torsion normal bundle.

Exact cyclotomic and big-float arithmetic on truncated series, normal forms
of resonant germs, normal-form models of neighborhoods and their holonomy
pencils, classification of bifoliated pairs, and numerical convergence
criteria.
"""

from .coefficients import QQ, exact_field, float_field, root_of_unity
from .errors import FormalError
from .series import LSeries, PSeries
from .germs import Germ
from .flows import MForm, VField, flow, formal_log, model_field, model_form
from .normalform import DiffeoNF, HolRep, PairNF, normalize_germ, normalize_pair
from .neighborhood import INFINITY, ModelSpec, Presentation, build_model, holonomy, involution
from .bifoliated import PairInvariants, classify_pair, tangency

__version__ = "0.1.0"

__all__ = [
    "QQ", "exact_field", "float_field", "root_of_unity", "FormalError", "LSeries", "PSeries", "Germ",
    "MForm", "VField", "flow", "formal_log", "model_field", "model_form", "DiffeoNF", "HolRep", "PairNF",
    "normalize_germ", "normalize_pair", "INFINITY", "ModelSpec", "Presentation", "build_model", "holonomy",
    "involution", "PairInvariants", "classify_pair", "tangency",
]
