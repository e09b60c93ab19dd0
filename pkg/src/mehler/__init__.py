"""Exact verification of Mehler-type Hermite generating-function identities."""

__version__ = "0.1.0"
