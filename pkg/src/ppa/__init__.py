"""Partial predicate abstraction and approximate CTL checking for integer programs."""

__version__ = "0.1.0"
