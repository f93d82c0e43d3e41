from .hungarian import hungarian_max
from .lp import LinearProgram, LpSolution, lp_solve

__all__ = ["LinearProgram", "LpSolution", "lp_solve", "hungarian_max"]
