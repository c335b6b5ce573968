"""Integration tests for the Onsager lab CLI.

These tests run the real stages on bundled and temporary run configurations
and check the tables, the manifest and the exit status end to end.

Test Organization:
    test_pipeline.py: Full runs, resume and stage-by-stage parity
    test_error_handling_integration.py: Configuration and manifest errors
    test_shock_dissipation.py: Stationary shock dissipation against its jump value
"""
