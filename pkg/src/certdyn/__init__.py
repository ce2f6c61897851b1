"""certdyn: certified computation in complex dynamics.

Verified Hausdorff-precision filled/ordinary Julia sets of polynomials,
rigorous Brjuno-sum evaluation, two-sided Siegel-disk conformal radius
bounds, and a constructive builder for rotation numbers realizing a
prescribed right-computable conformal radius.
"""

from .dyadic import Dyadic
from .ival import RIval
from .balls import BallUnion, ComplexBall, ball_mul, hausdorff_distance, refine

__all__ = [
    "Dyadic",
    "RIval",
    "BallUnion",
    "ComplexBall",
    "ball_mul",
    "hausdorff_distance",
    "refine",
]

__version__ = "0.1.0"
