"""Simple-current extensions of rational modular data, with fixed-point
resolution matrices and a validator for their consistency conditions."""

__version__ = "0.1.0"
