"""monoidkit: exact computations with finitely generated commutative monoids.

Submodules:
  lattice  - integer linear algebra (Smith normal form, abelian groups)
  cone     - exact rational polyhedral geometry and linear programming
  monoid   - affine monoids, membership, Hilbert bases, saturation
  hom      - homomorphism property checkers and minimal decompositions
  pushout  - pushouts of monoids in three categories, Kummer towers
  twisted  - twisted monoid algebras and character decompositions
  qkoszul  - truncated q-rings, log q-de Rham Koszul complexes, decalage
  cli      - command line front end emitting JSON certificates
"""

__version__ = "0.1.0"
