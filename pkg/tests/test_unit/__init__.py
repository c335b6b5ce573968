"""Unit tests for the numerical kernels, the batch layer and the CLI."""
