"""qugame: a desk-scale qudit simulator and quantum game-theory laboratory.

Subpackages:
  qstate  - statevector registers, gates, measurement
  qalgo   - Grover, Bernstein-Vazirani, order finding, Shor, RSA demo
  cgame   - bimatrix analysis: Nash, dominance, Pareto, ESS, core
  qgames  - the game protocols (spin flip, EWL, Newcomb, teleportation, ...)
  density - density matrices, Bloch picture, estimation, cloning
  cli     - reproducible command-line harness
"""

from .errors import DomainError, QugameError, ResourceError
from .rng import RandomSource

__all__ = ["DomainError", "QugameError", "ResourceError", "RandomSource"]

__version__ = "0.1.0"
