"""Exact computation with multiplicatively valued difference fields."""

from .values import ONE, ZERO, Surd, Value, compare, parse_value

__all__ = ["ONE", "ZERO", "Surd", "Value", "compare", "parse_value"]
