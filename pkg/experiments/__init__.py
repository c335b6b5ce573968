"""
Batch layer behind the command-line interface.

Run configurations, fixture construction, the resumable run manifest,
stage sweeps and the criteria summary live here.
"""
