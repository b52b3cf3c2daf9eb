"""Quasi-balanced weighing matrices, signed designs and their association schemes."""

__version__ = "0.1.0"
