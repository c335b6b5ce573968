"""Metamorphic relation tests for mollifiers, shift norms and commutators."""
