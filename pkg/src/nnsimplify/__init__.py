"""Verification-based simplification of fully-connected ReLU networks."""

__version__ = "0.1.0"
