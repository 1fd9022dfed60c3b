from .dilog import bloch_wigner, dilog, ldil, ldil_prime
from .potential import (
    CriticalPoint,
    PotentialProblem,
    coloring_from_critical,
    multistart,
    parabolic_search,
    potential_gradient,
    potential_problem,
    potential_value,
    segment_equations,
    solve_critical,
    volume,
)
from .shapes import ShapeQuad, pinched_report, shapes_from_coloring, shapes_from_rep
