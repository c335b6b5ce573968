"""
Visualization module for the Onsager energy-conservation lab.

This module renders log-log charts of the commutator and energy-defect
series written by the sweeps.
"""
