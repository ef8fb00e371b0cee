"""Exact computations around the Markoff equation a^2 + b^2 + c^2 = 3abc."""

__version__ = "0.1.0"
