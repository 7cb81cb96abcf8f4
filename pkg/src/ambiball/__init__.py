"""Metric balls of probability measures on finite spaces.

Prokhorov and Kantorovich distances, explicit supersets of the extreme
points of a ball around a measure with finitely many atoms, worst-case
optimization over the ball and brute-force polytope oracles.
"""
__version__ = "0.1.0"

from .distances import kantorovich, kantorovich_dual, ky_fan_check, prokhorov, strassen_feasible
from .extreme_sets import (
    CenterSpec,
    GammaRegion,
    MultiIndex,
    PiFamily,
    adjacency,
    adjacency_classes,
    family_classes,
    gamma_region,
    pi_bar_families,
    pi_element,
    project_candidates,
    slot_classes,
    theta_bar_families,
)
from .kernels import BACKEND
from .measures import Coupling, DiscreteMeasure, marginal_first, marginal_second
from .metric_space import FiniteMetricSpace, PointSet, from_points, inflate, validate_metric
from .optimizer import (
    LinearObjective,
    RobustResult,
    empirical_center,
    maximize_convex,
    maximize_linear_lp,
    maximize_linear_superset,
)

__all__ = [
    "BACKEND",
    "CenterSpec",
    "Coupling",
    "DiscreteMeasure",
    "FiniteMetricSpace",
    "GammaRegion",
    "LinearObjective",
    "MultiIndex",
    "PiFamily",
    "PointSet",
    "RobustResult",
    "adjacency",
    "adjacency_classes",
    "empirical_center",
    "family_classes",
    "from_points",
    "gamma_region",
    "inflate",
    "kantorovich",
    "kantorovich_dual",
    "ky_fan_check",
    "marginal_first",
    "marginal_second",
    "maximize_convex",
    "maximize_linear_lp",
    "maximize_linear_superset",
    "pi_bar_families",
    "pi_element",
    "project_candidates",
    "prokhorov",
    "slot_classes",
    "strassen_feasible",
    "theta_bar_families",
    "validate_metric",
]
