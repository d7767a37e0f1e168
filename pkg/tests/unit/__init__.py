"""Unit tests for nc_concentration components."""
