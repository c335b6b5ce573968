"""
Numerical core of the Onsager energy-conservation lab.

This package contains the periodic space-time lattice, Besov and BV
estimators, mollifiers, pressure laws, fixture generators, commutator
integrals and weak-form energy-defect diagnostics.
"""
