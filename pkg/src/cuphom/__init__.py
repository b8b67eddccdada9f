"""Exact computations in twisted cohomology of dg-algebras.

The central objects are twisting sequences (x3, x5, ...) on a dga, the
2-periodic twisted complexes they define on Laurent extensions, and the
Hirsch-algebra operations E_{p,q} on cubical and simplicial cochains that
make the set of twisting sequences a unital magma.  On the exterior algebra
(cochains of the one-vertex cubical torus) everything becomes combinatorial:
the canonical twisting sequence attached to a degree-3 class a is its list of
insertion powers (a, a^{o2}, a^{o3}, ...), and the homologies of the
resulting complexes are the cup and extended cup homology groups.
"""

__version__ = "0.1.0"
