"""Root subgroup factorization of SU(2)-valued loops.

Synthesis and recovery of loops from root-subgroup parameters, truncated
block Toeplitz/Hankel operator identities, triangular (Birkhoff) and
Riemann-Hilbert factorization, Birkhoff strata, and exact-rational
coefficient tables for the combinatorial expansions.
"""

from .laurent import MatrixLaurent, ScalarLaurent

__all__ = ["ScalarLaurent", "MatrixLaurent"]
__version__ = "0.1.0"
