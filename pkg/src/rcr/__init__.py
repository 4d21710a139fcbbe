"""Regression with cost-based rejection: surrogate training, metrics and oracles."""

__version__ = "0.1.0"
