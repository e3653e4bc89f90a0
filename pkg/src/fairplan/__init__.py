"""fairplan: fairness-aware neighborhood planning engine.

Evaluates how an urban design distributes accessibility benefits across
resident types, decomposes the resulting inequality, simulates resident
allocation, and recommends constraint-satisfying floor-area edits with
per-block attributions.
"""

from ._kernels import BACKEND
from .allocate import AllocationResult, SimulationResult, ipf, move_in_marginals, simulate
from .benefit import (
    BenefitMatrix,
    GroupStats,
    Population,
    ResidentProfile,
    ResidentType,
    benefit,
    benefit_matrix,
    group_stats,
    utility,
)
from .geo import AccessibilityMatrix, DistanceMatrix, accessibility, compute_distances
from .inequality import InequalityReport, decompose, ge_index
from .model import (
    Building,
    Block,
    CityDesign,
    Edit,
    PlanningConfig,
    apply_edit,
    validate_design,
)
from .recommend import (
    EditPlan,
    RecommendConstraints,
    RecommendationPlan,
    apply_plan,
    frank_wolfe,
    recommend,
)
from .attribution import AttributionReport, shapley_exact, shapley_sampled

__version__ = "0.1.0"
