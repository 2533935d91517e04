"""Evaluation harness for foundation models as Java refactoring oracles."""

__version__ = "0.1.0"
