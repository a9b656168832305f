"""Test suite for approx_exploit."""
