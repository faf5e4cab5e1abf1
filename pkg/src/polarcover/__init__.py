"""Generalized ovoids in finite classical polar spaces.

Enumeration of totally isotropic subspaces, verification and construction
of generalized ovoids (sets of totally isotropic subspaces meeting every
generator exactly once), the associated counting formulas and
non-existence bounds, and an exact-cover search for minimum covers.
"""

__version__ = "0.1.0"
