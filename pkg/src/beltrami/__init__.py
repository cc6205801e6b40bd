"""Explicit Beltrami, MHD and Euler field constructions with numerical checks."""
__version__ = "0.1.0"

from .calculus import ResidualReport, StencilConfig  # noqa: E402
from .catalog import RECIPES, build_case, get_recipe, list_recipes  # noqa: E402
from .charts import CHARTS, check_theorem1_hypothesis, get_chart  # noqa: E402
from .errors import BeltramiError  # noqa: E402
from .fields import FieldRecipe, Scalar, VectorFieldEval, build  # noqa: E402
from .flow import invariant_drift, trace_field_line  # noqa: E402
from .harmonic import get_pair, pair_catalog  # noqa: E402

__all__ = ["__version__", "ResidualReport", "StencilConfig", "RECIPES", "build_case",
           "get_recipe", "list_recipes", "CHARTS", "check_theorem1_hypothesis", "get_chart",
           "BeltramiError", "FieldRecipe", "Scalar", "VectorFieldEval", "build",
           "invariant_drift", "trace_field_line", "get_pair", "pair_catalog"]
