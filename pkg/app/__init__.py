# SolAut - automorphism groups of Sol 3-manifold groups
"""
SolAut
Aut(E) and Out(E) for torus bundles with Anosov monodromy and for sapphires,
with exact integer arithmetic and independent verification.
"""

__version__ = "0.1.0"
