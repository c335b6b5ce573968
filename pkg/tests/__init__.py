"""
Test suite for the Onsager energy-conservation lab.

This package contains unit, integration, property-based, metamorphic,
contract and performance tests, organized by module and functionality.
"""
