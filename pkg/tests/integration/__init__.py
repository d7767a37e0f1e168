"""Integration tests for end-to-end concentration experiments."""
