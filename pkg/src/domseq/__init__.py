"""Exact domination polynomials, log-concavity analysis and counterexample search."""

__version__ = "0.1.0"
