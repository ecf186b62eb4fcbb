"""
Incompressible Membrane Simulator

Helmholtz-Hodge projection and geodesic flow of volume-preserving
embeddings of closed curves and surfaces in R^n.
"""

__version__ = "1.0.0"
__description__ = "Incompressible Membrane Simulator"
