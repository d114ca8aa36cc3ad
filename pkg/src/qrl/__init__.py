"""Real quadratic orders: continued fractions, class numbers, L-values, bounds."""

__version__ = "0.1.0"
