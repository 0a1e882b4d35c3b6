"""Clifford-hierarchy classification, semi-Clifford detection and teleportation depth."""
__version__ = "0.1.0"
