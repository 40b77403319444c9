"""Fault-tolerant |H> magic-state preparation on triangular color codes."""

__version__ = "0.1.0"
