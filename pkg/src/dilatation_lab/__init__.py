"""dilatation-lab: a numerical laboratory for dilatation structures.

Metric spaces with a field of base-point-anchored dilatations, the operator
calculus they generate, concrete group models (Euclidean, Heisenberg, graded
nilpotent, the dyadic tree boundary, a complex-scale counterexample, chart
pullbacks), the emergent tangent operations, and the noncommutative affine
geometry of Menelaos points and collinear triples.  Everything is certified
numerically by the axiom harness; results are immutable reports, safe to
compute concurrently.
"""

__version__ = "0.1.0"

from dilatation_lab.core import (
    Ball, ConvergenceReport, Scale, approx_difference, approx_inverse,
    approx_sum, estimate_dx, rescaled_distance, verify_all_axioms, verify_axiom)
from dilatation_lab.models import (
    CarnotModel, ComplexHeisenbergModel, DyadicBoundaryModel, EuclideanModel,
    HeisenbergModel, PullbackModel, from_json)

__all__ = [
    "Ball", "CarnotModel", "ComplexHeisenbergModel", "ConvergenceReport",
    "DyadicBoundaryModel", "EuclideanModel", "HeisenbergModel",
    "PullbackModel", "Scale", "approx_difference", "approx_inverse",
    "approx_sum", "estimate_dx", "from_json", "rescaled_distance",
    "verify_all_axioms", "verify_axiom", "__version__",
]
