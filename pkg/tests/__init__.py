"""Test suite for the alphaeta lab."""
