"""Bi-hamiltonian structures on the big Bruhat cell of CP^n.

Numerical kernels for the Bruhat Poisson bivector, the symplectic
Fubini-Study bivector, their invariant family, Gelfand-Tsetlin patterns of
rank-one coadjoint orbits and the Lenard recursion, together with
verification suites that check each identity at sampled points.
"""

__version__ = "0.1.0"
